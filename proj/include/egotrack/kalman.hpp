// kalman.hpp: constant-velocity Kalman filter on the box state
// [u, v, s, r, du, dv, ds] -- center (u, v), area s, aspect ratio r.
// The aspect ratio is modeled as constant.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "egotrack/geometry.hpp"

namespace egotrack {

struct KalmanNoiseConfig {
  // Measurement noise on [u, v, s, r].
  Eigen::Vector4d measurement = {1.0, 1.0, 10.0, 10.0};
  // Process noise on the full state.
  Eigen::Matrix<double, 7, 1> process =
      (Eigen::Matrix<double, 7, 1>() << 1.0, 1.0, 1.0, 1.0, 1e-2, 1e-2, 1e-4)
          .finished();
  // Initial covariance: positions moderately uncertain, velocities very.
  Eigen::Matrix<double, 7, 1> initial =
      (Eigen::Matrix<double, 7, 1>() << 10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4)
          .finished();
};

using StateVector = Eigen::Matrix<double, 7, 1>;
using StateCovariance = Eigen::Matrix<double, 7, 7>;

struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Zero();
};

inline Eigen::Vector4d box_to_measurement(const BBox& b) {
  const Point c = center(b);
  return {c.x, c.y, b.area(), b.width() / b.height()};
}

// Inverse of box_to_measurement on the (u, v, s, r) slice of the state.
inline BBox state_to_box(const StateVector& x) {
  const double s = x(2);
  const double r = x(3);
  if (s <= 0.0 || r <= 0.0) {
    throw std::domain_error("state_to_box: non-positive area or aspect ratio");
  }
  const double w = std::sqrt(s * r);
  const double h = s / w;
  return BBox(x(0) - w / 2.0, x(1) - h / 2.0, x(0) + w / 2.0, x(1) + h / 2.0);
}

class BoxKalmanFilter {
public:
  explicit BoxKalmanFilter(const BBox& initial_box,
                           const KalmanNoiseConfig& noise = {})
    : noise_(noise) {
    state_.mean.setZero();
    state_.mean.head<4>() = box_to_measurement(initial_box);
    state_.covariance = noise.initial.asDiagonal();

    transition_.setIdentity();
    transition_(0, 4) = 1.0;
    transition_(1, 5) = 1.0;
    transition_(2, 6) = 1.0;

    observation_.setZero();
    observation_.block<4, 4>(0, 0).setIdentity();
  }

  // Time update. Returns the predicted mean rendered as a box. If the
  // predicted area would go non-positive, the area velocity is zeroed for
  // this step and the flag is reported.
  BBox predict() {
    if (state_.mean(2) + state_.mean(6) <= 0.0) {
      state_.mean(6) = 0.0;
      area_clamped_ = true;
    }
    state_.mean = transition_ * state_.mean;
    state_.covariance = transition_ * state_.covariance *
                            transition_.transpose() +
                        StateCovariance(noise_.process.asDiagonal());
    return state_to_box(state_.mean);
  }

  // Measurement correction with the standard Kalman gain.
  void update(const BBox& measurement_box) {
    const Eigen::Vector4d z = box_to_measurement(measurement_box);
    const Eigen::Vector4d innovation = z - observation_ * state_.mean;
    const Eigen::Matrix4d innovation_cov =
        observation_ * state_.covariance * observation_.transpose() +
        Eigen::Matrix4d(noise_.measurement.asDiagonal());
    const Eigen::FullPivLU<Eigen::Matrix4d> lu(innovation_cov);
    if (!lu.isInvertible()) {
      throw std::runtime_error("kalman update: singular innovation covariance");
    }
    const Eigen::Matrix<double, 7, 4> gain =
        state_.covariance * observation_.transpose() * lu.inverse();
    state_.mean += gain * innovation;
    state_.covariance =
        (StateCovariance::Identity() - gain * observation_) * state_.covariance;
    // Keep the covariance numerically symmetric.
    state_.covariance =
        0.5 * (state_.covariance + state_.covariance.transpose()).eval();
  }

  BBox current_box() const { return state_to_box(state_.mean); }
  const KalmanState& state() const { return state_; }
  KalmanState& mutable_state() { return state_; }
  bool area_was_clamped() const { return area_clamped_; }

private:
  KalmanNoiseConfig noise_;
  KalmanState state_;
  Eigen::Matrix<double, 7, 7> transition_;
  Eigen::Matrix<double, 4, 7> observation_;
  bool area_clamped_ = false;
};

}  // namespace egotrack
