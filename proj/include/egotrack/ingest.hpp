// ingest.hpp: loading of detection streams (JSONL), action-segment
// annotations (CSV) and participant splits, plus the confidence filter.

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "egotrack/geometry.hpp"

namespace egotrack {

struct ImageSize {
  double width = 0.0;
  double height = 0.0;
};

// Class-id convention: 0 = hand, 1..352 = noun classes.
struct DatasetSchema {
  int num_verb_classes = 125;
  int num_noun_classes = 352;
  int fps = 60;
};

struct DetectionRecord {
  std::string video_id;
  int64_t frame = 0;
  int class_id = 0;
  double confidence = 0.0;
  BBox box;
  ImageSize image_size;
};

struct ActionSegment {
  std::string video_id;
  int participant_id = 0;
  int64_t start_frame = 0;
  int64_t stop_frame = 0;
  int verb_class = 0;
  int noun_class = 0;
};

// frame -> detections, ordered by frame within one video.
using FrameDetections = std::map<int64_t, std::vector<DetectionRecord>>;
using VideoDetections = std::map<std::string, FrameDetections>;

namespace detail {

inline DetectionRecord parse_detection_line(const std::string& line,
                                            size_t line_no,
                                            const DatasetSchema& schema) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("detections line " + std::to_string(line_no) +
                             ": " + e.what());
  }
  try {
    const int class_id = j.at("class_id").get<int>();
    if (class_id < 0 || class_id > schema.num_noun_classes) {
      throw std::runtime_error("class_id " + std::to_string(class_id) +
                               " outside [0, " +
                               std::to_string(schema.num_noun_classes) + "]");
    }
    const double conf = j.at("confidence").get<double>();
    if (conf < 0.0 || conf > 1.0) {
      throw std::runtime_error("confidence outside [0,1]");
    }
    const int64_t frame = j.at("frame").get<int64_t>();
    if (frame < 0) throw std::runtime_error("negative frame index");
    return DetectionRecord{
        j.at("video_id").get<std::string>(),
        frame,
        class_id,
        conf,
        BBox(j.at("x1").get<double>(), j.at("y1").get<double>(),
             j.at("x2").get<double>(), j.at("y2").get<double>()),
        ImageSize{j.at("width").get<double>(), j.at("height").get<double>()}};
  } catch (const std::exception& e) {
    throw std::runtime_error("detections line " + std::to_string(line_no) +
                             ": " + e.what());
  }
}

}  // namespace detail

inline VideoDetections load_detections(const std::string& path,
                                       const DatasetSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open detections file: " + path);
  VideoDetections out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    DetectionRecord rec = detail::parse_detection_line(line, line_no, schema);
    out[rec.video_id][rec.frame].push_back(std::move(rec));
  }
  return out;
}

inline std::string serialize_detection(const DetectionRecord& r) {
  nlohmann::json j;
  j["video_id"] = r.video_id;
  j["frame"] = r.frame;
  j["class_id"] = r.class_id;
  j["confidence"] = r.confidence;
  j["x1"] = r.box.x_min();
  j["y1"] = r.box.y_min();
  j["x2"] = r.box.x_max();
  j["y2"] = r.box.y_max();
  j["width"] = r.image_size.width;
  j["height"] = r.image_size.height;
  return j.dump();
}

// Strict cut: only confidences strictly above the threshold survive.
inline std::vector<DetectionRecord> filter_by_confidence(
    const std::vector<DetectionRecord>& records, double threshold = 0.25) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw std::invalid_argument("confidence threshold outside [0,1]");
  }
  std::vector<DetectionRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.confidence > threshold) out.push_back(r);
  }
  return out;
}

inline VideoDetections filter_by_confidence(const VideoDetections& dets,
                                            double threshold = 0.25) {
  VideoDetections out;
  for (const auto& [vid, frames] : dets) {
    for (const auto& [frame, recs] : frames) {
      auto kept = filter_by_confidence(recs, threshold);
      if (!kept.empty()) out[vid][frame] = std::move(kept);
    }
  }
  return out;
}

inline std::vector<ActionSegment> load_annotations(const std::string& path,
                                                   const DatasetSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotations file: " + path);
  std::vector<ActionSegment> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("video_id", 0) == 0) continue;  // header
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) {
      throw std::runtime_error("annotations line " + std::to_string(line_no) +
                               ": expected 6 fields, got " +
                               std::to_string(fields.size()));
    }
    ActionSegment seg;
    try {
      seg.video_id = fields[0];
      seg.participant_id = std::stoi(fields[1]);
      seg.start_frame = std::stoll(fields[2]);
      seg.stop_frame = std::stoll(fields[3]);
      seg.verb_class = std::stoi(fields[4]);
      seg.noun_class = std::stoi(fields[5]);
    } catch (const std::exception&) {
      throw std::runtime_error("annotations line " + std::to_string(line_no) +
                               ": malformed numeric field");
    }
    if (seg.start_frame >= seg.stop_frame) {
      throw std::runtime_error("annotations line " + std::to_string(line_no) +
                               ": start_frame >= stop_frame");
    }
    if (seg.verb_class < 0 || seg.verb_class >= schema.num_verb_classes ||
        seg.noun_class < 0 || seg.noun_class >= schema.num_noun_classes) {
      throw std::runtime_error("annotations line " + std::to_string(line_no) +
                               ": class id out of schema bounds");
    }
    out.push_back(std::move(seg));
  }
  return out;
}

struct ParticipantSplit {
  std::set<int> train_ids;
  std::set<int> test_ids;
};

// Format: two lines, "train: 1,2,3" / "test: 25,26".
inline ParticipantSplit load_splits(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open splits file: " + path);
  ParticipantSplit split;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::set<int>* target = nullptr;
    std::string rest;
    if (line.rfind("train:", 0) == 0) {
      target = &split.train_ids;
      rest = line.substr(6);
    } else if (line.rfind("test:", 0) == 0) {
      target = &split.test_ids;
      rest = line.substr(5);
    } else {
      throw std::runtime_error("splits file: unrecognized line: " + line);
    }
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto first = tok.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      target->insert(std::stoi(tok.substr(first)));
    }
  }
  return split;
}

inline std::pair<std::vector<ActionSegment>, std::vector<ActionSegment>>
split_by_participant(const std::vector<ActionSegment>& segments,
                     const std::set<int>& train_ids,
                     const std::set<int>& test_ids) {
  for (int id : train_ids) {
    if (test_ids.count(id)) {
      throw std::invalid_argument("participant id " + std::to_string(id) +
                                  " appears in both splits");
    }
  }
  std::vector<ActionSegment> train, test;
  for (const auto& seg : segments) {
    if (train_ids.count(seg.participant_id)) {
      train.push_back(seg);
    } else if (test_ids.count(seg.participant_id)) {
      test.push_back(seg);
    }
    // participants in neither list are dropped
  }
  return {train, test};
}

}  // namespace egotrack
