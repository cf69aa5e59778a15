// tracker.hpp: tracking-by-detection for a single-class box stream.
// Kalman prediction per video frame, IoU-gated assignment, and track
// lifecycle control via iou_min / t_lost / t_min.

#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "egotrack/assignment.hpp"
#include "egotrack/geometry.hpp"
#include "egotrack/kalman.hpp"

namespace egotrack {

struct TrackerConfig {
  double iou_min = 0.10;
  int t_lost = 10;   // frames a track survives without a detection
  int t_min = 1;     // consecutive detections to instantiate / revive
  KalmanNoiseConfig noise;
};

enum class TrackStatus { tentative, active, finalized };

struct TrackPoint {
  int64_t frame = 0;
  BBox box;
};

struct Track {
  int id = 0;
  std::vector<TrackPoint> points;  // detected points, frames strictly increasing
  TrackStatus status = TrackStatus::tentative;
  int frames_since_update = 0;
  int hit_streak = 0;
};

class Tracker {
public:
  explicit Tracker(const TrackerConfig& config = {}) : config_(config) {
    if (config.iou_min <= 0.0 || config.iou_min >= 1.0 ||
        config.t_lost < 0 || config.t_min < 1) {
      throw std::invalid_argument("Tracker: invalid configuration");
    }
  }

  // Advance to `frame` (strictly increasing; gaps allowed, every skipped
  // video frame counts toward t_lost) and associate `detections`.
  // Returns a snapshot of the currently active tracks.
  std::vector<Track> step(int64_t frame, const std::vector<BBox>& detections) {
    if (has_stepped_ && frame <= last_frame_) {
      throw std::invalid_argument("Tracker::step: non-monotone frame index");
    }
    const int64_t delta = has_stepped_ ? frame - last_frame_ : 1;
    last_frame_ = frame;
    has_stepped_ = true;

    // Age and predict each live track once per elapsed video frame.
    std::vector<BBox> predictions;
    predictions.reserve(live_.size());
    for (auto& lt : live_) {
      lt.track.frames_since_update += static_cast<int>(delta);
      BBox predicted = lt.filter->current_box();
      for (int64_t k = 0; k < delta; ++k) predicted = lt.filter->predict();
      predictions.push_back(predicted);
    }

    // Tracks that already missed more than t_lost frames before this one
    // are gone; frames_since_update counts the current frame as pending.
    for (size_t i = live_.size(); i-- > 0;) {
      if (live_[i].track.frames_since_update - 1 > config_.t_lost) {
        retire(i);
        predictions.erase(predictions.begin() + static_cast<long>(i));
      }
    }

    // Cost: 1 - IoU between predictions and detections, gated afterwards.
    std::vector<char> det_matched(detections.size(), 0);
    if (!live_.empty() && !detections.empty()) {
      CostMatrix cost(live_.size(), std::vector<double>(detections.size()));
      for (size_t i = 0; i < live_.size(); ++i)
        for (size_t j = 0; j < detections.size(); ++j)
          cost[i][j] = 1.0 - iou(predictions[i], detections[j]);
      for (const auto& [ti, dj] : assign(cost)) {
        if (iou(predictions[ti], detections[dj]) < config_.iou_min) continue;
        auto& lt = live_[ti];
        lt.filter->update(detections[dj]);
        lt.track.points.push_back({frame, detections[dj]});
        if (lt.track.frames_since_update > 1) lt.track.hit_streak = 0;
        lt.track.frames_since_update = 0;
        ++lt.track.hit_streak;
        if (lt.track.hit_streak >= config_.t_min)
          lt.track.status = TrackStatus::active;
        det_matched[dj] = 1;
      }
    }

    // Unmatched detections spawn new tracks.
    for (size_t j = 0; j < detections.size(); ++j) {
      if (det_matched[j]) continue;
      LiveTrack lt;
      lt.filter = std::make_unique<BoxKalmanFilter>(detections[j], config_.noise);
      lt.track.id = next_id_++;
      lt.track.points.push_back({frame, detections[j]});
      lt.track.hit_streak = 1;
      lt.track.frames_since_update = 0;
      lt.track.status = lt.track.hit_streak >= config_.t_min
                            ? TrackStatus::active
                            : TrackStatus::tentative;
      live_.push_back(std::move(lt));
    }

    std::vector<Track> out;
    for (const auto& lt : live_) {
      if (lt.track.status == TrackStatus::active) out.push_back(lt.track);
    }
    return out;
  }

  // Flush: finalize everything still live (end of video).
  void finish() {
    while (!live_.empty()) retire(live_.size() - 1);
  }

  const std::vector<Track>& finalized_tracks() const { return finalized_; }

  std::vector<Track> live_tracks() const {
    std::vector<Track> out;
    out.reserve(live_.size());
    for (const auto& lt : live_) out.push_back(lt.track);
    return out;
  }

private:
  struct LiveTrack {
    std::unique_ptr<BoxKalmanFilter> filter;
    Track track;
  };

  void retire(size_t index) {
    Track t = std::move(live_[index].track);
    live_.erase(live_.begin() + static_cast<long>(index));
    if (t.status == TrackStatus::tentative && t.points.size() <
        static_cast<size_t>(config_.t_min)) {
      return;  // never reached activation; drop
    }
    t.status = TrackStatus::finalized;
    finalized_.push_back(std::move(t));
  }

  TrackerConfig config_;
  std::vector<LiveTrack> live_;
  std::vector<Track> finalized_;
  int next_id_ = 1;
  int64_t last_frame_ = 0;
  bool has_stepped_ = false;
};

// Convenience: run a whole per-frame stream through one tracker instance
// and return every finalized track.
inline std::vector<Track> track_stream(
    const std::vector<std::pair<int64_t, std::vector<BBox>>>& frames,
    const TrackerConfig& config = {}) {
  Tracker tracker(config);
  for (const auto& [frame, boxes] : frames) tracker.step(frame, boxes);
  tracker.finish();
  return tracker.finalized_tracks();
}

}  // namespace egotrack
