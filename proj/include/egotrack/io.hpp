// io.hpp: on-disk formats. Track dumps (JSONL), timeline CSV, binary
// feature containers with a JSONL index, model checkpoints (little-endian
// 64-bit floats) and training history CSV.

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "egotrack/features.hpp"
#include "egotrack/lstm.hpp"
#include "egotrack/tracker.hpp"
#include "egotrack/train.hpp"
#include "egotrack/trackpost.hpp"

namespace egotrack {

// --- track dump: one JSONL line per track point ---

inline void write_track_dump(std::ostream& out, const std::string& video_id,
                             const std::vector<Track>& tracks) {
  for (const auto& t : tracks) {
    for (const auto& p : t.points) {
      nlohmann::json j;
      j["video_id"] = video_id;
      j["track_id"] = t.id;
      j["frame"] = p.frame;
      j["x1"] = p.box.x_min();
      j["y1"] = p.box.y_min();
      j["x2"] = p.box.x_max();
      j["y2"] = p.box.y_max();
      j["provenance"] = "detected";
      out << j.dump() << "\n";
    }
  }
}

// --- timeline CSV: frame,left_x,left_y,left_src,right_x,right_y,right_src ---

inline void write_timeline_csv(std::ostream& out, const HandTimeline& tl) {
  out << "frame,left_x,left_y,left_src,right_x,right_y,right_src\n";
  for (size_t f = 0; f < tl.left.size(); ++f) {
    const auto& l = tl.left[f];
    const auto& r = tl.right[f];
    out << f << ',' << l.position.x << ',' << l.position.y << ','
        << provenance_name(l.provenance) << ',' << r.position.x << ','
        << r.position.y << ',' << provenance_name(r.provenance) << "\n";
  }
}

inline HandTimeline read_timeline_csv(std::istream& in,
                                      const std::string& video_id = {}) {
  HandTimeline tl;
  tl.video_id = video_id;
  std::string line;
  std::getline(in, line);  // header
  auto parse_prov = [](const std::string& s) {
    if (s == "detected") return PointProvenance::detected;
    if (s == "interpolated") return PointProvenance::interpolated;
    if (s == "sentinel") return PointProvenance::sentinel;
    throw std::runtime_error("timeline csv: unknown provenance: " + s);
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[7];
    for (int i = 0; i < 7; ++i) {
      if (!std::getline(ss, f[i], ',')) {
        throw std::runtime_error("timeline csv: short row: " + line);
      }
    }
    const int64_t frame = std::stoll(f[0]);
    tl.left.push_back({frame, {std::stod(f[1]), std::stod(f[2])}, parse_prov(f[3])});
    tl.right.push_back({frame, {std::stod(f[4]), std::stod(f[5])}, parse_prov(f[6])});
  }
  return tl;
}

// --- feature container: header + row-major float32 payload per sequence ---
//
// File layout, little-endian:
//   magic "EGFT", uint32 version, uint32 sequence count,
//   then per sequence: uint32 kind, uint32 D, uint32 T, int32 label,
//   uint32 video_id length, video_id bytes, T*D float32 values.

namespace detail {

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("feature container: truncated file");
  return value;
}

}  // namespace detail

inline void write_feature_container(std::ostream& out,
                                    const std::vector<FeatureSequence>& seqs) {
  out.write("EGFT", 4);
  detail::write_pod<uint32_t>(out, 1);
  detail::write_pod<uint32_t>(out, static_cast<uint32_t>(seqs.size()));
  for (const auto& s : seqs) {
    detail::write_pod<uint32_t>(out, static_cast<uint32_t>(s.kind));
    detail::write_pod<uint32_t>(out, static_cast<uint32_t>(s.steps.cols()));
    detail::write_pod<uint32_t>(out, static_cast<uint32_t>(s.steps.rows()));
    detail::write_pod<int32_t>(out, s.label);
    detail::write_pod<uint32_t>(out, static_cast<uint32_t>(s.video_id.size()));
    out.write(s.video_id.data(), static_cast<std::streamsize>(s.video_id.size()));
    for (Eigen::Index t = 0; t < s.steps.rows(); ++t) {
      for (Eigen::Index d = 0; d < s.steps.cols(); ++d) {
        detail::write_pod<float>(out, static_cast<float>(s.steps(t, d)));
      }
    }
  }
}

inline std::vector<FeatureSequence> read_feature_container(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "EGFT", 4) != 0) {
    throw std::runtime_error("feature container: bad magic");
  }
  const uint32_t version = detail::read_pod<uint32_t>(in);
  if (version != 1) {
    throw std::runtime_error("feature container: unsupported version");
  }
  const uint32_t count = detail::read_pod<uint32_t>(in);
  std::vector<FeatureSequence> out;
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    FeatureSequence s;
    s.kind = static_cast<FeatureKind>(detail::read_pod<uint32_t>(in));
    const uint32_t d = detail::read_pod<uint32_t>(in);
    const uint32_t t = detail::read_pod<uint32_t>(in);
    s.label = detail::read_pod<int32_t>(in);
    const uint32_t id_len = detail::read_pod<uint32_t>(in);
    s.video_id.resize(id_len);
    in.read(s.video_id.data(), id_len);
    s.steps.resize(t, d);
    for (uint32_t row = 0; row < t; ++row) {
      for (uint32_t col = 0; col < d; ++col) {
        s.steps(row, col) = detail::read_pod<float>(in);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_feature_index(std::ostream& out,
                                const std::vector<FeatureSequence>& seqs) {
  for (size_t i = 0; i < seqs.size(); ++i) {
    nlohmann::json j;
    j["index"] = i;
    j["video_id"] = seqs[i].video_id;
    j["kind"] = feature_kind_name(seqs[i].kind);
    j["dim"] = seqs[i].steps.cols();
    j["length"] = seqs[i].steps.rows();
    j["label"] = seqs[i].label;
    out << j.dump() << "\n";
  }
}

// --- model checkpoint: config header + 64-bit parameter blobs ---

inline void save_checkpoint(std::ostream& out, const LstmModel& model,
                            uint64_t seed = 0) {
  out.write("EGCK", 4);
  detail::write_pod<uint32_t>(out, 1);
  detail::write_pod<uint64_t>(out, seed);
  detail::write_pod<int32_t>(out, model.config.input_dim);
  detail::write_pod<int32_t>(out, model.config.hidden_units);
  detail::write_pod<int32_t>(out, model.config.num_layers);
  detail::write_pod<int32_t>(out, model.config.num_classes);
  LstmModel& mut = const_cast<LstmModel&>(model);
  for (const auto& view : parameter_views(mut)) {
    out.write(reinterpret_cast<const char*>(view.data()),
              static_cast<std::streamsize>(view.size() * sizeof(double)));
  }
}

inline LstmModel load_checkpoint(std::istream& in, uint64_t* seed = nullptr) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "EGCK", 4) != 0) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  if (detail::read_pod<uint32_t>(in) != 1) {
    throw std::runtime_error("checkpoint: unsupported version");
  }
  const uint64_t stored_seed = detail::read_pod<uint64_t>(in);
  if (seed) *seed = stored_seed;
  ClassifierConfig config;
  config.input_dim = detail::read_pod<int32_t>(in);
  config.hidden_units = detail::read_pod<int32_t>(in);
  config.num_layers = detail::read_pod<int32_t>(in);
  config.num_classes = detail::read_pod<int32_t>(in);
  LstmModel model = init_model(config, 0);
  for (auto& view : parameter_views(model)) {
    in.read(reinterpret_cast<char*>(view.data()),
            static_cast<std::streamsize>(view.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated parameters");
  }
  return model;
}

// --- training history CSV ---

inline void write_history_csv(std::ostream& out,
                              const std::vector<EpochRecord>& history) {
  out << "epoch,loss,top1,top5\n";
  for (const auto& rec : history) {
    out << rec.epoch << ',' << rec.loss << ',' << rec.top1 << ',' << rec.top5
        << "\n";
  }
}

}  // namespace egotrack
