// trackpost.hpp: raw tracks to a complete per-frame left/right hand
// timeline. Linear interpolation of box centers over intermediate frames,
// hand-side assignment from the first detection, removal of redundant
// same-side tracks, sentinel fill for uncovered frames.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "egotrack/geometry.hpp"
#include "egotrack/ingest.hpp"
#include "egotrack/tracker.hpp"

namespace egotrack {

enum class HandSide { Left, Right };

enum class PointProvenance { detected, interpolated, sentinel };

inline const char* provenance_name(PointProvenance p) {
  switch (p) {
    case PointProvenance::detected: return "detected";
    case PointProvenance::interpolated: return "interpolated";
    default: return "sentinel";
  }
}

// One per-frame center; pixel coordinates until build_timeline normalizes.
struct CenterPoint {
  int64_t frame = 0;
  Point position;
  PointProvenance provenance = PointProvenance::detected;
};

struct CenterTrack {
  int id = 0;
  std::vector<CenterPoint> points;  // frame-sorted, contiguous after interpolation

  size_t detected_count() const {
    size_t n = 0;
    for (const auto& p : points)
      if (p.provenance == PointProvenance::detected) ++n;
    return n;
  }
};

// Fill every intermediate frame between consecutive detections by linear
// interpolation of the box centers. No extrapolation beyond the endpoints.
inline CenterTrack interpolate_track(const Track& track) {
  CenterTrack out;
  out.id = track.id;
  for (size_t i = 0; i < track.points.size(); ++i) {
    const auto& cur = track.points[i];
    const Point c = center(cur.box);
    out.points.push_back({cur.frame, c, PointProvenance::detected});
    if (i + 1 >= track.points.size()) break;
    const auto& next = track.points[i + 1];
    const Point cn = center(next.box);
    const int64_t span = next.frame - cur.frame;
    for (int64_t f = cur.frame + 1; f < next.frame; ++f) {
      const double t = static_cast<double>(f - cur.frame) / static_cast<double>(span);
      out.points.push_back({f,
                            {c.x + t * (cn.x - c.x), c.y + t * (cn.y - c.y)},
                            PointProvenance::interpolated});
    }
  }
  return out;
}

// Left if the first detection's center is left of the frame midline;
// exact midline goes Right.
inline HandSide assign_hand_side(const Track& track, double frame_width) {
  if (track.points.empty()) {
    throw std::invalid_argument("assign_hand_side: empty track");
  }
  return center(track.points.front().box).x < frame_width / 2.0
             ? HandSide::Left
             : HandSide::Right;
}

struct SidedTrack {
  CenterTrack track;
  HandSide side = HandSide::Left;
};

// For frames claimed by several tracks of the same side, the track with
// the most detected points keeps the frame (ties to the smaller id); the
// losers keep only their non-conflicting frames. Tracks that lose every
// frame disappear.
inline std::vector<SidedTrack> eliminate_overlaps(std::vector<SidedTrack> tracks) {
  auto rank_better = [](const SidedTrack& a, const SidedTrack& b) {
    const size_t da = a.track.detected_count(), db = b.track.detected_count();
    if (da != db) return da > db;
    return a.track.id < b.track.id;
  };
  for (int side_i = 0; side_i < 2; ++side_i) {
    const HandSide side = side_i == 0 ? HandSide::Left : HandSide::Right;
    // frame -> index of the winning track
    std::map<int64_t, size_t> owner;
    for (size_t i = 0; i < tracks.size(); ++i) {
      if (tracks[i].side != side) continue;
      for (const auto& p : tracks[i].track.points) {
        auto it = owner.find(p.frame);
        if (it == owner.end()) {
          owner[p.frame] = i;
        } else if (rank_better(tracks[i], tracks[it->second])) {
          it->second = i;
        }
      }
    }
    for (size_t i = 0; i < tracks.size(); ++i) {
      if (tracks[i].side != side) continue;
      auto& pts = tracks[i].track.points;
      pts.erase(std::remove_if(pts.begin(), pts.end(),
                               [&](const CenterPoint& p) {
                                 return owner.at(p.frame) != i;
                               }),
                pts.end());
    }
  }
  tracks.erase(std::remove_if(tracks.begin(), tracks.end(),
                              [](const SidedTrack& t) {
                                return t.track.points.empty();
                              }),
               tracks.end());
  return tracks;
}

struct TimelinePoint {
  int64_t frame = 0;
  Point position;  // unit-normalized, or the side's sentinel
  PointProvenance provenance = PointProvenance::sentinel;
};

inline constexpr Point kSentinelLeft{0.25, 1.5};
inline constexpr Point kSentinelRight{0.75, 1.5};

struct HandTimeline {
  std::string video_id;
  std::vector<TimelinePoint> left;   // one entry per frame, index == frame
  std::vector<TimelinePoint> right;
};

// Complete per-frame timeline: track coverage normalized by the image
// size, everything else sentinel-filled.
inline HandTimeline build_timeline(const std::vector<SidedTrack>& tracks,
                                   int64_t num_frames,
                                   const ImageSize& image_size,
                                   const std::string& video_id = {}) {
  HandTimeline tl;
  tl.video_id = video_id;
  tl.left.resize(static_cast<size_t>(num_frames));
  tl.right.resize(static_cast<size_t>(num_frames));
  for (int64_t f = 0; f < num_frames; ++f) {
    tl.left[f] = {f, kSentinelLeft, PointProvenance::sentinel};
    tl.right[f] = {f, kSentinelRight, PointProvenance::sentinel};
  }
  for (const auto& st : tracks) {
    auto& lane = st.side == HandSide::Left ? tl.left : tl.right;
    for (const auto& p : st.track.points) {
      if (p.frame < 0 || p.frame >= num_frames) {
        throw std::out_of_range("build_timeline: track frame " +
                                std::to_string(p.frame) +
                                " outside [0, " + std::to_string(num_frames) + ")");
      }
      lane[p.frame] = {p.frame,
                       normalize(p.position, image_size.width, image_size.height),
                       p.provenance};
    }
  }
  return tl;
}

// Full per-video post-processing chain for hand tracks.
inline HandTimeline tracks_to_timeline(const std::vector<Track>& raw_tracks,
                                       int64_t num_frames,
                                       const ImageSize& image_size,
                                       const std::string& video_id = {}) {
  std::vector<SidedTrack> sided;
  for (const auto& t : raw_tracks) {
    if (t.points.empty()) continue;
    sided.push_back({interpolate_track(t), assign_hand_side(t, image_size.width)});
  }
  return build_timeline(eliminate_overlaps(std::move(sided)), num_frames,
                        image_size, video_id);
}

}  // namespace egotrack
