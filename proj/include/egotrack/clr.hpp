// clr.hpp: cyclical learning rate, triangular policy. One full cycle
// spans cycle_epochs (base -> max -> base); the half_cycle flag instead
// reads cycle_epochs as the one-way ramp length.

#pragma once

#include <cmath>
#include <stdexcept>

namespace egotrack {

struct CLRConfig {
  double base_lr = 1e-3;
  double max_lr = 1e-1;
  double cycle_epochs = 20.0;
  bool half_cycle = false;
};

// t is measured in epochs and may be fractional (per-iteration advance).
inline double clr(double t, const CLRConfig& cfg) {
  if (cfg.base_lr < 0.0 || cfg.base_lr > cfg.max_lr) {
    throw std::invalid_argument("clr: require 0 <= base_lr <= max_lr");
  }
  if (t < 0.0) throw std::invalid_argument("clr: negative time");
  const double stepsize =
      cfg.half_cycle ? cfg.cycle_epochs : cfg.cycle_epochs / 2.0;
  const double cycle = std::floor(1.0 + t / (2.0 * stepsize));
  const double x = std::abs(t / stepsize - 2.0 * cycle + 1.0);
  return cfg.base_lr + (cfg.max_lr - cfg.base_lr) * std::max(0.0, 1.0 - x);
}

}  // namespace egotrack
