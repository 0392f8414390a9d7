// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pfcam/perspective_field.hpp"

#include <span>
#include <vector>

namespace pfcam {

struct Point2 {
  double x;
  double y;
};

using Polyline = std::vector<Point2>;

/// Unit up-vector anchored at an integer pixel.
struct Arrow {
  double x;
  double y;
  double dx;
  double dy;
};

struct Contour {
  double level;
  std::vector<Polyline> lines;
};

/// Display geometry for a field: sparse arrows plus latitude iso-lines.
struct FieldOverlay {
  int grid = 0;
  std::vector<Arrow> arrows;
  std::vector<Contour> contours;

  [[nodiscard]] bool empty() const { return arrows.empty() && contours.empty(); }
};

inline constexpr int kMinOverlayGrid = 4;

/// -75, -60, ..., 75 degrees.
std::vector<double> default_contour_levels();

/// Iso-lines of a row-major raster sampled at integer pixel centers.
/// Segments are chained into polylines; closed loops repeat their first point.
std::vector<Polyline> marching_squares(std::span<const double> raster, int width, int height, double level);

/// Arrows at floor(grid/2) + k*grid on both axes, skipping masked pixels,
/// and latitude contours at each level. Throws std::invalid_argument for
/// grid < 4, levels outside [-90, 90] or levels not strictly increasing.
FieldOverlay make_overlay(const PerspectiveField& pf, int grid, std::span<const double> levels);

}  // namespace pfcam
