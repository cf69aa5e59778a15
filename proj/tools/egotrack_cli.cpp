// egotrack command line: track -> featurize -> train -> evaluate, plus
// detector-eval and trajectory plots.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "egotrack/egotrack.hpp"

namespace fs = std::filesystem;
using namespace egotrack;

namespace {

struct Options {
  std::string detections;
  std::string annotations;
  std::string splits;
  std::string out_dir = "out";
  std::string kind = "lr";
  std::string seq = "full";  // "full" or "32"
  int hidden = 32;
  uint64_t seed = 0;
  bool deterministic = false;
  double confidence = 0.25;
  double iou_thresh = 0.25;
  double base_lr = 1e-3;
  double max_lr = 1e-1;
  int epochs = 1000;
  int batch_size = 128;
  // detector-eval / plot specific
  std::string predictions;
  std::string ground_truth;
  std::string timeline;
  std::string out_file;
  std::optional<int64_t> sampled;
};

void add_common_flags(CLI::App* cmd, Options& opt) {
  // Config file values are overridden by explicit flags.
  cmd->set_config("--config");
  cmd->add_option("--detections", opt.detections, "detections.jsonl path");
  cmd->add_option("--annotations", opt.annotations, "annotations.csv path");
  cmd->add_option("--splits", opt.splits, "splits file path");
  cmd->add_option("--kind", opt.kind, "feature kind")
      ->check(CLI::IsMember({"lr", "lr-bpv", "lr-trc-bpv", "lr-obj"}));
  cmd->add_option("--seq", opt.seq, "sequence mode")
      ->check(CLI::IsMember({"full", "32"}));
  cmd->add_option("--hidden", opt.hidden, "hidden units")
      ->check(CLI::IsMember({8, 16, 32}));
  cmd->add_option("--seed", opt.seed, "random seed");
  cmd->add_flag("--deterministic", opt.deterministic, "fixed reduction order");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--confidence", opt.confidence, "detection confidence cut");
  cmd->add_option("--epochs", opt.epochs, "training epochs");
  cmd->add_option("--batch-size", opt.batch_size, "mini-batch size");
  cmd->add_option("--base-lr", opt.base_lr, "CLR base learning rate");
  cmd->add_option("--max-lr", opt.max_lr, "CLR max learning rate");
}

int64_t video_frame_count(const FrameDetections& frames,
                          const std::vector<ActionSegment>& segments,
                          const std::string& video_id) {
  int64_t n = frames.empty() ? 0 : frames.rbegin()->first + 1;
  for (const auto& seg : segments) {
    if (seg.video_id == video_id) n = std::max(n, seg.stop_frame);
  }
  return n;
}

ImageSize video_image_size(const FrameDetections& frames) {
  for (const auto& [f, recs] : frames) {
    if (!recs.empty()) return recs.front().image_size;
  }
  return {1920.0, 1080.0};
}

// Worker cap: EGO_TRACK_THREADS bounds the per-video worker count.
size_t worker_count(size_t items) {
  size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EGO_TRACK_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<size_t>(cap));
  }
  return std::max<size_t>(1, std::min(n, items));
}

int cmd_track(const Options& opt) {
  const auto all = filter_by_confidence(load_detections(opt.detections),
                                        opt.confidence);
  std::vector<ActionSegment> segments;
  if (!opt.annotations.empty()) segments = load_annotations(opt.annotations);
  fs::create_directories(opt.out_dir);

  std::vector<const std::pair<const std::string, FrameDetections>*> videos;
  for (const auto& entry : all) videos.push_back(&entry);

  struct VideoStats {
    size_t tracks = 0, sentinel = 0, points = 0;
  };
  std::vector<VideoStats> stats(videos.size());

  auto process_video = [&](size_t v) {
    const auto& [video_id, frames] = *videos[v];
    std::vector<std::pair<int64_t, std::vector<BBox>>> hand_stream;
    for (const auto& [frame, recs] : frames) {
      std::vector<BBox> boxes;
      for (const auto& r : recs) {
        if (r.class_id == 0) boxes.push_back(r.box);
      }
      if (!boxes.empty()) hand_stream.emplace_back(frame, boxes);
    }
    const auto tracks = track_stream(hand_stream);
    stats[v].tracks = tracks.size();

    const ImageSize size = video_image_size(frames);
    const int64_t num_frames = video_frame_count(frames, segments, video_id);
    const HandTimeline tl =
        tracks_to_timeline(tracks, num_frames, size, video_id);

    std::ofstream track_out(fs::path(opt.out_dir) / (video_id + "_tracks.jsonl"));
    write_track_dump(track_out, video_id, tracks);
    std::ofstream tl_out(fs::path(opt.out_dir) / (video_id + "_timeline.csv"));
    write_timeline_csv(tl_out, tl);

    for (const auto& p : tl.left) {
      ++stats[v].points;
      if (p.provenance == PointProvenance::sentinel) ++stats[v].sentinel;
    }
    for (const auto& p : tl.right) {
      ++stats[v].points;
      if (p.provenance == PointProvenance::sentinel) ++stats[v].sentinel;
    }
  };

  const size_t workers = worker_count(videos.size());
  if (workers <= 1) {
    for (size_t v = 0; v < videos.size(); ++v) process_video(v);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t v = next++; v < videos.size(); v = next++) process_video(v);
      });
    }
    for (auto& t : pool) t.join();
  }

  size_t total_tracks = 0, total_sentinel = 0, total_points = 0;
  for (const auto& s : stats) {
    total_tracks += s.tracks;
    total_sentinel += s.sentinel;
    total_points += s.points;
  }
  std::cout << "videos: " << all.size() << "  tracks: " << total_tracks
            << "  sentinel fraction: "
            << (total_points ? static_cast<double>(total_sentinel) / total_points
                             : 0.0)
            << "\n";
  return 0;
}

int cmd_featurize(const Options& opt) {
  const DatasetSchema schema;
  const auto detections = filter_by_confidence(load_detections(opt.detections),
                                               opt.confidence);
  const auto segments = load_annotations(opt.annotations);
  const auto split = load_splits(opt.splits);
  const auto [train_segs, test_segs] =
      split_by_participant(segments, split.train_ids, split.test_ids);
  const FeatureKind kind = feature_kind_from_name(opt.kind);
  fs::create_directories(opt.out_dir);

  size_t skipped = 0;
  auto build_split = [&](const std::vector<ActionSegment>& segs,
                         const std::string& name) {
    std::vector<FeatureSequence> out;
    for (const auto& seg : segs) {
      const fs::path tl_path =
          fs::path(opt.out_dir) / (seg.video_id + "_timeline.csv");
      std::ifstream tl_in(tl_path);
      if (!tl_in) {
        std::cerr << "warning: no timeline for " << seg.video_id
                  << ", skipping segment\n";
        ++skipped;
        continue;
      }
      const HandTimeline tl = read_timeline_csv(tl_in, seg.video_id);
      if (seg.stop_frame > static_cast<int64_t>(tl.left.size())) {
        std::cerr << "warning: segment outside video range in " << seg.video_id
                  << ", skipping\n";
        ++skipped;
        continue;
      }
      FrameDetections objects;
      ImageSize size{1920.0, 1080.0};
      auto it = detections.find(seg.video_id);
      if (it != detections.end()) {
        objects = it->second;
        size = video_image_size(it->second);
      }
      out.push_back(build_features(kind, tl, objects, seg, size, schema));
    }
    std::ofstream bin(fs::path(opt.out_dir) /
                          ("features_" + name + "_" + opt.kind + ".bin"),
                      std::ios::binary);
    write_feature_container(bin, out);
    std::ofstream idx(fs::path(opt.out_dir) /
                      ("features_" + name + "_" + opt.kind + ".idx.jsonl"));
    write_feature_index(idx, out);
    return out.size();
  };
  const size_t n_train = build_split(train_segs, "train");
  const size_t n_test = build_split(test_segs, "test");
  std::cout << "train sequences: " << n_train << "  test sequences: " << n_test
            << "  skipped: " << skipped << "\n";
  return 0;
}

std::vector<FeatureSequence> load_split_features(const Options& opt,
                                                 const std::string& name) {
  const fs::path path =
      fs::path(opt.out_dir) / ("features_" + name + "_" + opt.kind + ".bin");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  auto seqs = read_feature_container(in);
  if (opt.seq == "32") {
    for (auto& s : seqs) s.steps = sample_sequence(s.steps, 32);
  }
  return seqs;
}

ClassificationReport full_report(const LstmModel& model,
                                 const std::vector<FeatureSequence>& train_set,
                                 const std::vector<FeatureSequence>& test_set) {
  std::map<int, int64_t> train_counts;
  for (const auto& s : train_set) ++train_counts[s.label];
  std::vector<int> labels;
  for (const auto& s : test_set) labels.push_back(s.label);
  const Eigen::MatrixXd scores = score_all(model, test_set);
  ClassificationReport report =
      per_class_pr(predict_all(model, test_set), labels, train_counts);
  report.top1 = topk(scores, labels, 1);
  report.top5 = topk(scores, labels, 5);
  return report;
}

void emit_report(const Options& opt, const ClassificationReport& report,
                 int64_t best_epoch) {
  nlohmann::json j;
  j["top1"] = report.top1;
  j["top5"] = report.top5;
  j["mean_precision"] = report.mean_precision;
  j["mean_recall"] = report.mean_recall;
  j["best_epoch"] = best_epoch;
  j["seed"] = opt.seed;
  for (const auto& [cls, stats] : report.per_class) {
    j["per_class"][std::to_string(cls)] = {{"precision", stats.precision},
                                           {"recall", stats.recall},
                                           {"train_count", stats.train_count}};
  }
  std::ofstream out(fs::path(opt.out_dir) / "report.json");
  out << j.dump(2) << "\n";

  ResultRow row;
  row.index = 1;
  row.feature = opt.kind;
  row.hidden = opt.hidden;
  row.layers = 2;
  row.seq_length = opt.seq == "32" ? "32" : "Full";
  row.top1 = report.top1;
  row.top5 = report.top5;
  row.cls_precision = report.mean_precision;
  row.cls_recall = report.mean_recall;
  row.epoch = best_epoch;
  std::cout << format_results_table({row});
}

int cmd_train(const Options& opt) {
  const auto train_set = load_split_features(opt, "train");
  const auto test_set = load_split_features(opt, "test");
  if (train_set.empty()) throw std::runtime_error("empty training split");

  ClassifierConfig config;
  config.input_dim = static_cast<int>(train_set.front().steps.cols());
  config.hidden_units = opt.hidden;
  CLRConfig clr_config;
  clr_config.base_lr = opt.base_lr;
  clr_config.max_lr = opt.max_lr;
  TrainConfig train_config;
  train_config.batch_size = opt.batch_size;
  train_config.epochs = opt.epochs;
  train_config.seed = opt.seed;

  const TrainResult result =
      train(train_set, test_set, config, clr_config, train_config);

  fs::create_directories(opt.out_dir);
  std::ofstream ck(fs::path(opt.out_dir) / "checkpoint.bin", std::ios::binary);
  save_checkpoint(ck, result.model, opt.seed);
  std::ofstream hist(fs::path(opt.out_dir) / "history.csv");
  write_history_csv(hist, result.history);

  emit_report(opt, full_report(result.model, train_set, test_set),
              result.best_epoch);
  return 0;
}

int cmd_evaluate(const Options& opt) {
  const auto train_set = load_split_features(opt, "train");
  const auto test_set = load_split_features(opt, "test");
  std::ifstream ck(fs::path(opt.out_dir) / "checkpoint.bin", std::ios::binary);
  if (!ck) throw std::runtime_error("no checkpoint in " + opt.out_dir);
  const LstmModel model = load_checkpoint(ck);
  if (!test_set.empty() &&
      model.config.input_dim != test_set.front().steps.cols()) {
    throw std::runtime_error("checkpoint/feature dimension mismatch");
  }
  emit_report(opt, full_report(model, train_set, test_set), -1);
  return 0;
}

int cmd_detector_eval(const Options& opt) {
  auto load_boxes = [](const std::string& path) {
    const auto per_video = load_detections(path);
    std::vector<RankedDetection> dets;
    GroundTruth gt;
    for (const auto& [vid, frames] : per_video) {
      for (const auto& [frame, recs] : frames) {
        const std::string image_id = vid + "/" + std::to_string(frame);
        for (const auto& r : recs) {
          dets.push_back({image_id, r.confidence, r.box});
          gt[image_id].push_back(r.box);
        }
      }
    }
    return std::make_pair(dets, gt);
  };
  const auto [dets, dets_as_gt] = load_boxes(opt.predictions);
  const auto [gt_dets, gt] = load_boxes(opt.ground_truth);
  (void)dets_as_gt;
  (void)gt_dets;
  const DetectionReport report = evaluate_detections(dets, gt, opt.iou_thresh);
  std::cout << "TP: " << report.tp << "  FP: " << report.fp
            << "  FN: " << report.fn << "\n";
  if (report.ap) {
    std::cout << "AP@" << opt.iou_thresh << ": " << *report.ap << "%\n";
  } else {
    std::cout << "AP: n/a (no ground truth; FP count = " << report.fp << ")\n";
  }
  if (report.fdr) {
    std::cout << "FDR: " << *report.fdr << "%\n";
  } else {
    std::cout << "FDR: n/a (no detections)\n";
  }
  return 0;
}

int cmd_plot(const Options& opt) {
  std::ifstream in(opt.timeline);
  if (!in) throw std::runtime_error("cannot open timeline: " + opt.timeline);
  const HandTimeline tl = read_timeline_csv(in);
  const std::string svg = plot_timeline_svg(tl, opt.sampled);
  std::ofstream out(opt.out_file);
  if (!out) throw std::runtime_error("cannot write " + opt.out_file);
  out << svg;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"egocentric hand-track action recognition pipeline"};
  app.require_subcommand(1);
  Options opt;

  auto* track = app.add_subcommand("track", "run tracking over detections");
  add_common_flags(track, opt);
  auto* featurize = app.add_subcommand("featurize", "build feature containers");
  add_common_flags(featurize, opt);
  auto* train_cmd = app.add_subcommand("train", "train the sequence classifier");
  add_common_flags(train_cmd, opt);
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint");
  add_common_flags(evaluate, opt);

  auto* det_eval = app.add_subcommand("detector-eval", "detection metrics");
  det_eval->add_option("--predictions", opt.predictions, "predicted detections")
      ->required();
  det_eval->add_option("--ground-truth", opt.ground_truth, "ground truth boxes")
      ->required();
  det_eval->add_option("--iou", opt.iou_thresh, "IoU threshold");

  auto* plot = app.add_subcommand("plot", "render a trajectory SVG");
  plot->add_option("--timeline", opt.timeline, "timeline CSV")->required();
  plot->add_option("--svg", opt.out_file, "output SVG path")->required();
  int64_t sampled_flag = 0;
  auto* sampled_opt =
      plot->add_option("--sampled", sampled_flag, "sampled overlay steps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sampled_opt->count()) opt.sampled = sampled_flag;

    if (track->parsed()) return cmd_track(opt);
    if (featurize->parsed()) return cmd_featurize(opt);
    if (train_cmd->parsed()) return cmd_train(opt);
    if (evaluate->parsed()) return cmd_evaluate(opt);
    if (det_eval->parsed()) return cmd_detector_eval(opt);
    if (plot->parsed()) return cmd_plot(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
