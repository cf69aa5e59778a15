// features.hpp: per-segment feature encodings for sequence classification.
// LR (hand coordinates, 4), LR+BPV / LR+Trc BPV (object presence, 356),
// LR+Obj (tracked object coordinates, 708), plus fixed-length sampling
// and batch zero-padding.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "egotrack/ingest.hpp"
#include "egotrack/trackpost.hpp"
#include "egotrack/tracker.hpp"

namespace egotrack {

enum class FeatureKind { LR, LR_BPV, LR_TRC_BPV, LR_OBJ };

inline int feature_dim(FeatureKind kind, const DatasetSchema& schema = {}) {
  switch (kind) {
    case FeatureKind::LR: return 4;
    case FeatureKind::LR_BPV:
    case FeatureKind::LR_TRC_BPV: return 4 + schema.num_noun_classes;
    default: return 4 + 2 * schema.num_noun_classes;
  }
}

inline const char* feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::LR: return "lr";
    case FeatureKind::LR_BPV: return "lr-bpv";
    case FeatureKind::LR_TRC_BPV: return "lr-trc-bpv";
    default: return "lr-obj";
  }
}

inline FeatureKind feature_kind_from_name(const std::string& name) {
  if (name == "lr") return FeatureKind::LR;
  if (name == "lr-bpv") return FeatureKind::LR_BPV;
  if (name == "lr-trc-bpv") return FeatureKind::LR_TRC_BPV;
  if (name == "lr-obj") return FeatureKind::LR_OBJ;
  throw std::invalid_argument("unknown feature kind: " + name);
}

struct FeatureSequence {
  std::string video_id;
  FeatureKind kind = FeatureKind::LR;
  Eigen::MatrixXd steps;  // T x D, row per frame / sampled step
  int label = 0;          // verb class
};

// Row per segment frame: (Lx, Ly, Rx, Ry); absent hands carry the
// sentinel coordinates.
inline Eigen::MatrixXd build_lr(const HandTimeline& timeline,
                                const ActionSegment& segment) {
  const int64_t n = static_cast<int64_t>(timeline.left.size());
  if (segment.start_frame < 0 || segment.stop_frame > n) {
    throw std::out_of_range("build_lr: segment outside timeline range");
  }
  const int64_t t_len = segment.stop_frame - segment.start_frame;
  Eigen::MatrixXd out(t_len, 4);
  for (int64_t t = 0; t < t_len; ++t) {
    const auto& l = timeline.left[segment.start_frame + t];
    const auto& r = timeline.right[segment.start_frame + t];
    out(t, 0) = l.position.x;
    out(t, 1) = l.position.y;
    out(t, 2) = r.position.x;
    out(t, 3) = r.position.y;
  }
  return out;
}

// Object detections of one video restricted to a segment: noun class ids
// are 1..num_noun_classes; column index is class_id - 1.
inline Eigen::MatrixXd build_bpv(const FrameDetections& detections,
                                 const ActionSegment& segment,
                                 const DatasetSchema& schema = {}) {
  const int64_t t_len = segment.stop_frame - segment.start_frame;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t_len, schema.num_noun_classes);
  auto it = detections.lower_bound(segment.start_frame);
  for (; it != detections.end() && it->first < segment.stop_frame; ++it) {
    for (const auto& rec : it->second) {
      if (rec.class_id < 1 || rec.class_id > schema.num_noun_classes) continue;
      out(it->first - segment.start_frame, rec.class_id - 1) = 1.0;
    }
  }
  return out;
}

namespace detail {

// Per noun class, the finalized tracks of its detections within a segment.
inline std::map<int, std::vector<Track>> track_objects(
    const FrameDetections& detections, const ActionSegment& segment,
    const DatasetSchema& schema, const TrackerConfig& config) {
  std::map<int, std::vector<std::pair<int64_t, std::vector<BBox>>>> streams;
  auto it = detections.lower_bound(segment.start_frame);
  for (; it != detections.end() && it->first < segment.stop_frame; ++it) {
    std::map<int, std::vector<BBox>> by_class;
    for (const auto& rec : it->second) {
      if (rec.class_id < 1 || rec.class_id > schema.num_noun_classes) continue;
      by_class[rec.class_id].push_back(rec.box);
    }
    for (auto& [cls, boxes] : by_class) {
      streams[cls].emplace_back(it->first, std::move(boxes));
    }
  }
  std::map<int, std::vector<Track>> out;
  for (auto& [cls, frames] : streams) out[cls] = track_stream(frames, config);
  return out;
}

}  // namespace detail

// Like build_bpv, but detections are tracked per class first, so presence
// extends over interpolated intermediate frames.
inline Eigen::MatrixXd build_trc_bpv(const FrameDetections& detections,
                                     const ActionSegment& segment,
                                     const DatasetSchema& schema = {},
                                     const TrackerConfig& tracker_config = {}) {
  const int64_t t_len = segment.stop_frame - segment.start_frame;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t_len, schema.num_noun_classes);
  for (const auto& [cls, tracks] :
       detail::track_objects(detections, segment, schema, tracker_config)) {
    for (const auto& track : tracks) {
      for (const auto& p : interpolate_track(track).points) {
        out(p.frame - segment.start_frame, cls - 1) = 1.0;
      }
    }
  }
  return out;
}

// Per class, two columns with the normalized center of the class's
// longest-running track (most detected points, ties to the smaller id);
// (0, 0) wherever that track is absent.
inline Eigen::MatrixXd build_obj_coords(const FrameDetections& detections,
                                        const ActionSegment& segment,
                                        const ImageSize& image_size,
                                        const DatasetSchema& schema = {},
                                        const TrackerConfig& tracker_config = {}) {
  const int64_t t_len = segment.stop_frame - segment.start_frame;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t_len, 2 * schema.num_noun_classes);
  for (const auto& [cls, tracks] :
       detail::track_objects(detections, segment, schema, tracker_config)) {
    const Track* best = nullptr;
    size_t best_count = 0;
    for (const auto& track : tracks) {
      size_t n = track.points.size();
      if (!best || n > best_count || (n == best_count && track.id < best->id)) {
        best = &track;
        best_count = n;
      }
    }
    if (!best) continue;
    for (const auto& p : interpolate_track(*best).points) {
      const Point u = normalize(p.position, image_size.width, image_size.height);
      out(p.frame - segment.start_frame, 2 * (cls - 1)) = u.x;
      out(p.frame - segment.start_frame, 2 * (cls - 1) + 1) = u.y;
    }
  }
  return out;
}

// Concatenated feature for a segment: [Lx, Ly, Rx, Ry | per-class block].
inline FeatureSequence build_features(FeatureKind kind,
                                      const HandTimeline& timeline,
                                      const FrameDetections& object_detections,
                                      const ActionSegment& segment,
                                      const ImageSize& image_size,
                                      const DatasetSchema& schema = {},
                                      const TrackerConfig& tracker_config = {}) {
  FeatureSequence seq;
  seq.video_id = segment.video_id;
  seq.kind = kind;
  seq.label = segment.verb_class;
  const Eigen::MatrixXd lr = build_lr(timeline, segment);
  switch (kind) {
    case FeatureKind::LR:
      seq.steps = lr;
      break;
    case FeatureKind::LR_BPV: {
      const Eigen::MatrixXd bpv = build_bpv(object_detections, segment, schema);
      seq.steps.resize(lr.rows(), lr.cols() + bpv.cols());
      seq.steps << lr, bpv;
      break;
    }
    case FeatureKind::LR_TRC_BPV: {
      const Eigen::MatrixXd bpv =
          build_trc_bpv(object_detections, segment, schema, tracker_config);
      seq.steps.resize(lr.rows(), lr.cols() + bpv.cols());
      seq.steps << lr, bpv;
      break;
    }
    case FeatureKind::LR_OBJ: {
      const Eigen::MatrixXd obj = build_obj_coords(
          object_detections, segment, image_size, schema, tracker_config);
      seq.steps.resize(lr.rows(), lr.cols() + obj.cols());
      seq.steps << lr, obj;
      break;
    }
  }
  return seq;
}

// Deterministic uniform resampling: row i of the output is input row
// floor(i * T / target). Shorter inputs repeat rows.
inline Eigen::MatrixXd sample_sequence(const Eigen::MatrixXd& seq,
                                       int64_t target = 32) {
  if (seq.rows() < 1 || target < 1) {
    throw std::invalid_argument("sample_sequence: empty input or target");
  }
  Eigen::MatrixXd out(target, seq.cols());
  for (int64_t i = 0; i < target; ++i) {
    out.row(i) = seq.row(i * seq.rows() / target);
  }
  return out;
}

struct PaddedBatch {
  std::vector<Eigen::MatrixXd> sequences;  // all T_max x D, zero beyond length
  std::vector<int64_t> lengths;            // true lengths for read-out
  std::vector<int> labels;
  FeatureKind kind = FeatureKind::LR;
};

inline PaddedBatch pad_batch(const std::vector<FeatureSequence>& seqs) {
  if (seqs.empty()) throw std::invalid_argument("pad_batch: empty batch");
  PaddedBatch batch;
  batch.kind = seqs.front().kind;
  int64_t t_max = 0;
  for (const auto& s : seqs) {
    if (s.kind != batch.kind) {
      throw std::invalid_argument("pad_batch: mixed feature kinds");
    }
    t_max = std::max(t_max, static_cast<int64_t>(s.steps.rows()));
  }
  for (const auto& s : seqs) {
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(t_max, s.steps.cols());
    padded.topRows(s.steps.rows()) = s.steps;
    batch.sequences.push_back(std::move(padded));
    batch.lengths.push_back(s.steps.rows());
    batch.labels.push_back(s.label);
  }
  return batch;
}

}  // namespace egotrack
