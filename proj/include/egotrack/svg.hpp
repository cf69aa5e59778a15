// svg.hpp: trajectory plots. One polyline per hand over the unit square,
// sentinel frames omitted; optionally a second panel with the sequence
// sampled to a fixed number of steps.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "egotrack/features.hpp"
#include "egotrack/trackpost.hpp"

namespace egotrack {

namespace detail {

struct SvgPanel {
  std::vector<Point> left;
  std::vector<Point> right;
  std::string title;
};

inline void render_panel(std::ostringstream& out, const SvgPanel& panel,
                         double x_offset, double size) {
  const double pad = 20.0;
  const double plot = size - 2 * pad;
  auto map_x = [&](double x) { return x_offset + pad + x * plot; };
  auto map_y = [&](double y) { return pad + y * plot; };

  out << "<rect x=\"" << x_offset + pad << "\" y=\"" << pad << "\" width=\""
      << plot << "\" height=\"" << plot
      << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << x_offset + size / 2 << "\" y=\"" << size - 4
      << "\" text-anchor=\"middle\" font-size=\"10\">" << panel.title
      << "</text>\n";

  auto polyline = [&](const std::vector<Point>& pts, const char* color,
                      const char* dash) {
    if (pts.empty()) return;
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.2\"";
    if (dash[0]) out << " stroke-dasharray=\"" << dash << "\"";
    out << " points=\"";
    for (const auto& p : pts) out << map_x(p.x) << ',' << map_y(p.y) << ' ';
    out << "\"/>\n";
  };
  polyline(panel.left, "#1f77b4", "");
  polyline(panel.right, "#d62728", "4,2");
}

inline SvgPanel timeline_panel(const HandTimeline& tl, const std::string& title) {
  SvgPanel panel;
  panel.title = title;
  for (const auto& p : tl.left) {
    if (p.provenance != PointProvenance::sentinel) panel.left.push_back(p.position);
  }
  for (const auto& p : tl.right) {
    if (p.provenance != PointProvenance::sentinel) panel.right.push_back(p.position);
  }
  return panel;
}

inline SvgPanel lr_panel(const Eigen::MatrixXd& lr, const std::string& title) {
  SvgPanel panel;
  panel.title = title;
  for (Eigen::Index t = 0; t < lr.rows(); ++t) {
    if (lr(t, 1) <= 1.0) panel.left.push_back({lr(t, 0), lr(t, 1)});
    if (lr(t, 3) <= 1.0) panel.right.push_back({lr(t, 2), lr(t, 3)});
  }
  return panel;
}

inline std::string render_svg(const std::vector<SvgPanel>& panels) {
  const double size = 240.0;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << size * panels.size() << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size * panels.size() << ' ' << size << "\">\n";
  for (size_t i = 0; i < panels.size(); ++i) {
    render_panel(out, panels[i], i * size, size);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace detail

// Full-length trajectories, optionally alongside the same sequence
// sampled to `sampled_steps`.
inline std::string plot_timeline_svg(const HandTimeline& tl,
                                     std::optional<int64_t> sampled_steps = {}) {
  std::vector<detail::SvgPanel> panels;
  panels.push_back(detail::timeline_panel(
      tl, "full (" + std::to_string(tl.left.size()) + " steps)"));
  if (sampled_steps && !tl.left.empty()) {
    Eigen::MatrixXd lr(tl.left.size(), 4);
    for (size_t f = 0; f < tl.left.size(); ++f) {
      lr(f, 0) = tl.left[f].position.x;
      lr(f, 1) = tl.left[f].position.y;
      lr(f, 2) = tl.right[f].position.x;
      lr(f, 3) = tl.right[f].position.y;
    }
    panels.push_back(detail::lr_panel(
        sample_sequence(lr, *sampled_steps),
        "sampled to " + std::to_string(*sampled_steps)));
  }
  return detail::render_svg(panels);
}

inline std::string plot_sequence_svg(const Eigen::MatrixXd& lr,
                                     std::optional<int64_t> sampled_steps = {}) {
  std::vector<detail::SvgPanel> panels;
  panels.push_back(detail::lr_panel(
      lr, "full (" + std::to_string(lr.rows()) + " steps)"));
  if (sampled_steps && lr.rows() > 0) {
    panels.push_back(detail::lr_panel(
        sample_sequence(lr, *sampled_steps),
        "sampled to " + std::to_string(*sampled_steps)));
  }
  return detail::render_svg(panels);
}

}  // namespace egotrack
