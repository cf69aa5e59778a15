// eval.hpp: classification metrics (top-k, mean per-class precision and
// recall over classes with enough training samples) and detection metrics
// (average precision at a fixed IoU threshold, false detection rate).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "egotrack/geometry.hpp"

namespace egotrack {

// Fraction (in %) of rows whose label ranks among the k best scores.
// Equal scores rank by lower class id.
inline double topk(const Eigen::MatrixXd& scores,
                   const std::vector<int>& labels, int k) {
  if (k < 1) throw std::invalid_argument("topk: k must be >= 1");
  if (scores.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw std::invalid_argument("topk: rows/labels mismatch");
  }
  if (scores.rows() == 0) return 0.0;
  int hits = 0;
  std::vector<int> order(scores.cols());
  for (Eigen::Index n = 0; n < scores.rows(); ++n) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (scores(n, a) != scores(n, b)) return scores(n, a) > scores(n, b);
      return a < b;
    });
    const auto end = order.begin() + std::min<size_t>(k, order.size());
    if (std::find(order.begin(), end, labels[n]) != end) ++hits;
  }
  return 100.0 * hits / static_cast<double>(scores.rows());
}

struct PerClassStats {
  double precision = 0.0;
  double recall = 0.0;
  int64_t train_count = 0;
};

struct ClassificationReport {
  double top1 = 0.0;
  double top5 = 0.0;
  std::map<int, PerClassStats> per_class;  // eligible classes only
  double mean_precision = 0.0;
  double mean_recall = 0.0;
};

// Macro-averaged precision/recall over classes whose training count is
// strictly greater than min_train. Classes never predicted contribute
// precision 0; classes absent from the test labels contribute recall 0.
inline ClassificationReport per_class_pr(
    const std::vector<int>& predictions, const std::vector<int>& labels,
    const std::map<int, int64_t>& train_counts, int64_t min_train = 100) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("per_class_pr: predictions/labels mismatch");
  }
  ClassificationReport report;
  std::map<int, int64_t> tp, fp, fn;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] == labels[i]) {
      ++tp[labels[i]];
    } else {
      ++fp[predictions[i]];
      ++fn[labels[i]];
    }
  }
  double prec_sum = 0.0, rec_sum = 0.0;
  int64_t eligible = 0;
  for (const auto& [cls, count] : train_counts) {
    if (count <= min_train) continue;
    ++eligible;
    const int64_t t = tp.count(cls) ? tp.at(cls) : 0;
    const int64_t p = fp.count(cls) ? fp.at(cls) : 0;
    const int64_t n = fn.count(cls) ? fn.at(cls) : 0;
    PerClassStats stats;
    stats.train_count = count;
    stats.precision = (t + p) > 0 ? 100.0 * t / static_cast<double>(t + p) : 0.0;
    stats.recall = (t + n) > 0 ? 100.0 * t / static_cast<double>(t + n) : 0.0;
    report.per_class[cls] = stats;
    prec_sum += stats.precision;
    rec_sum += stats.recall;
  }
  if (eligible > 0) {
    report.mean_precision = prec_sum / static_cast<double>(eligible);
    report.mean_recall = rec_sum / static_cast<double>(eligible);
  }
  return report;
}

struct RankedDetection {
  std::string image_id;
  double confidence = 0.0;
  BBox box;
};

using GroundTruth = std::map<std::string, std::vector<BBox>>;

struct DetectionReport {
  std::optional<double> ap;   // absent when there is no ground truth
  std::optional<double> fdr;  // absent when there are no detections
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
};

enum class ApInterpolation { all_points, eleven_point };

// Greedy matching: detections in descending confidence (ties keep input
// order), each matched to its highest-IoU still-unmatched ground truth;
// a match below the threshold is a false positive.
inline DetectionReport evaluate_detections(
    const std::vector<RankedDetection>& detections, const GroundTruth& gt,
    double iou_thresh = 0.25,
    ApInterpolation interp = ApInterpolation::all_points) {
  std::vector<size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return detections[a].confidence > detections[b].confidence;
  });

  int64_t total_gt = 0;
  std::map<std::string, std::vector<char>> gt_used;
  for (const auto& [img, boxes] : gt) {
    total_gt += static_cast<int64_t>(boxes.size());
    gt_used[img].assign(boxes.size(), 0);
  }

  std::vector<char> is_tp(detections.size(), 0);
  for (size_t idx : order) {
    const auto& det = detections[idx];
    auto it = gt.find(det.image_id);
    if (it == gt.end()) continue;
    double best_iou = 0.0;
    int best_j = -1;
    for (size_t j = 0; j < it->second.size(); ++j) {
      if (gt_used[det.image_id][j]) continue;
      const double v = iou(det.box, it->second[j]);
      if (v > best_iou) {
        best_iou = v;
        best_j = static_cast<int>(j);
      }
    }
    if (best_j >= 0 && best_iou >= iou_thresh) {
      gt_used[det.image_id][best_j] = 1;
      is_tp[idx] = 1;
    }
  }

  DetectionReport report;
  for (char t : is_tp) t ? ++report.tp : ++report.fp;
  report.fn = total_gt - report.tp;
  if (!detections.empty()) {
    report.fdr = 100.0 * report.fp / static_cast<double>(report.tp + report.fp);
  }
  if (total_gt == 0) return report;  // FP-count-only regime

  // Precision/recall curve down the ranked list.
  std::vector<double> precision, recall;
  int64_t tp_run = 0, fp_run = 0;
  for (size_t idx : order) {
    is_tp[idx] ? ++tp_run : ++fp_run;
    precision.push_back(tp_run / static_cast<double>(tp_run + fp_run));
    recall.push_back(tp_run / static_cast<double>(total_gt));
  }

  double ap = 0.0;
  if (interp == ApInterpolation::all_points) {
    // Monotone precision envelope, integrated over recall steps.
    for (size_t i = precision.size(); i-- > 1;) {
      precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double prev_recall = 0.0;
    for (size_t i = 0; i < precision.size(); ++i) {
      ap += (recall[i] - prev_recall) * precision[i];
      prev_recall = recall[i];
    }
  } else {
    for (int r = 0; r <= 10; ++r) {
      const double level = r / 10.0;
      double best = 0.0;
      for (size_t i = 0; i < precision.size(); ++i) {
        if (recall[i] >= level) best = std::max(best, precision[i]);
      }
      ap += best / 11.0;
    }
  }
  report.ap = 100.0 * ap;
  return report;
}

// One row of the verb-classification results table.
struct ResultRow {
  int index = 0;
  std::string model = "LSTM";
  std::string feature;
  int hidden = 0;
  int layers = 0;
  std::string seq_length;  // "Full" or "32"
  std::string target = "Verbs";
  double top1 = 0.0;
  double top5 = 0.0;
  double cls_precision = 0.0;
  double cls_recall = 0.0;
  int64_t epoch = 0;
};

inline std::string format_results_table(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(4) << "#" << std::setw(8) << "Model"
      << std::setw(12) << "Feature" << std::setw(8) << "Hidden"
      << std::setw(8) << "Layers" << std::setw(13) << "Seq. Length"
      << std::setw(8) << "Target" << std::setw(9) << "Top-1"
      << std::setw(9) << "Top-5" << std::setw(15) << "Cls Precision"
      << std::setw(12) << "Cls Recall" << "Epoch\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& r : rows) {
    out << std::left << std::setw(4) << r.index << std::setw(8) << r.model
        << std::setw(12) << r.feature << std::setw(8) << r.hidden
        << std::setw(8) << r.layers << std::setw(13) << r.seq_length
        << std::setw(8) << r.target << std::setw(9) << r.top1
        << std::setw(9) << r.top5 << std::setw(15) << r.cls_precision
        << std::setw(12) << r.cls_recall << r.epoch << "\n";
  }
  return out.str();
}

}  // namespace egotrack
