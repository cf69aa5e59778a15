// geometry.hpp: axis-aligned bounding boxes, centers, IoU, coordinate
// normalization. Shared by tracking, features and evaluation.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace egotrack {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(const Point& a, const Point& b) {
  return a.x == b.x && a.y == b.y;
}

// Continuous rectangle in image coordinates (origin top-left).
// Degenerate or non-finite boxes are rejected at construction.
class BBox {
public:
  BBox(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
    if (!(std::isfinite(x_min) && std::isfinite(y_min) &&
          std::isfinite(x_max) && std::isfinite(y_max))) {
      throw std::invalid_argument("BBox: non-finite coordinate");
    }
    if (!(x_min < x_max) || !(y_min < y_max)) {
      throw std::invalid_argument("BBox: empty or inverted rectangle");
    }
  }

  double x_min() const { return x_min_; }
  double y_min() const { return y_min_; }
  double x_max() const { return x_max_; }
  double y_max() const { return y_max_; }

  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }
  double area() const { return width() * height(); }

private:
  double x_min_, y_min_, x_max_, y_max_;
};

inline Point center(const BBox& b) {
  return {(b.x_min() + b.x_max()) / 2.0, (b.y_min() + b.y_max()) / 2.0};
}

// Intersection over union; 0 when disjoint, 1 for identical boxes.
inline double iou(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const double iy = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

inline Point normalize(const Point& p, double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw std::invalid_argument("normalize: non-positive image dimensions");
  }
  return {p.x / width, p.y / height};
}

inline Point denormalize(const Point& p, double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw std::invalid_argument("denormalize: non-positive image dimensions");
  }
  return {p.x * width, p.y * height};
}

}  // namespace egotrack
