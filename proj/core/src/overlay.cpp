// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfcam/overlay.hpp"

#include <fmt/format.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace pfcam {

std::vector<double> default_contour_levels() {
  std::vector<double> levels;
  for (int l = -75; l <= 75; l += 15) levels.push_back(l);
  return levels;
}

namespace {

enum Side : int { kTop = 0, kRight = 1, kBottom = 2, kLeft = 3 };

// Segments per corner configuration (bit 0 = top-left, 1 = top-right,
// 2 = bottom-right, 3 = bottom-left; bit set = above the level). Saddles
// (5, 10) are resolved separately from the cell-center average.
constexpr std::array<std::array<int, 4>, 16> kCases = {{
    {-1, -1, -1, -1},
    {kLeft, kTop, -1, -1},
    {kTop, kRight, -1, -1},
    {kLeft, kRight, -1, -1},
    {kRight, kBottom, -1, -1},
    {-1, -1, -1, -1},
    {kTop, kBottom, -1, -1},
    {kLeft, kBottom, -1, -1},
    {kBottom, kLeft, -1, -1},
    {kTop, kBottom, -1, -1},
    {-1, -1, -1, -1},
    {kRight, kBottom, -1, -1},
    {kLeft, kRight, -1, -1},
    {kTop, kRight, -1, -1},
    {kLeft, kTop, -1, -1},
    {-1, -1, -1, -1},
}};

struct Segment {
  std::int64_t a;
  std::int64_t b;
};

}  // namespace

std::vector<Polyline> marching_squares(std::span<const double> raster, int width, int height, double level) {
  if (raster.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("marching_squares: raster size mismatch");
  }
  auto value = [&](int x, int y) { return raster[static_cast<std::size_t>(y) * width + x]; };
  // Horizontal edge (x,y)-(x+1,y) -> 2*(y*w+x); vertical edge (x,y)-(x,y+1) -> +1.
  auto edge_id = [&](int x, int y, Side side) -> std::int64_t {
    switch (side) {
      case kTop: return 2 * (static_cast<std::int64_t>(y) * width + x);
      case kBottom: return 2 * (static_cast<std::int64_t>(y + 1) * width + x);
      case kLeft: return 2 * (static_cast<std::int64_t>(y) * width + x) + 1;
      case kRight: return 2 * (static_cast<std::int64_t>(y) * width + x + 1) + 1;
    }
    return -1;
  };
  auto edge_point = [&](std::int64_t id) -> Point2 {
    const bool vertical = (id & 1) != 0;
    const std::int64_t cell = id >> 1;
    const int x = static_cast<int>(cell % width);
    const int y = static_cast<int>(cell / width);
    const double a = value(x, y);
    const double b = vertical ? value(x, y + 1) : value(x + 1, y);
    const double t = (b == a) ? 0.5 : (level - a) / (b - a);
    return vertical ? Point2{static_cast<double>(x), y + t} : Point2{x + t, static_cast<double>(y)};
  };

  std::vector<Segment> segments;
  for (int y = 0; y + 1 < height; ++y) {
    for (int x = 0; x + 1 < width; ++x) {
      const double tl = value(x, y);
      const double tr = value(x + 1, y);
      const double br = value(x + 1, y + 1);
      const double bl = value(x, y + 1);
      const int code = (tl > level ? 1 : 0) | (tr > level ? 2 : 0) | (br > level ? 4 : 0) | (bl > level ? 8 : 0);
      if (code == 0 || code == 15) continue;
      if (code == 5 || code == 10) {
        const bool center_above = 0.25 * (tl + tr + br + bl) > level;
        // Separate the corners that are not joined through the center.
        const bool split_tl_br = (code == 5) != center_above;
        if (split_tl_br) {
          segments.push_back({edge_id(x, y, kLeft), edge_id(x, y, kTop)});
          segments.push_back({edge_id(x, y, kRight), edge_id(x, y, kBottom)});
        } else {
          segments.push_back({edge_id(x, y, kTop), edge_id(x, y, kRight)});
          segments.push_back({edge_id(x, y, kBottom), edge_id(x, y, kLeft)});
        }
        continue;
      }
      const auto& c = kCases[code];
      segments.push_back({edge_id(x, y, static_cast<Side>(c[0])), edge_id(x, y, static_cast<Side>(c[1]))});
    }
  }

  std::unordered_map<std::int64_t, std::array<int, 2>> incident;
  incident.reserve(segments.size() * 2);
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    for (const std::int64_t e : {segments[s].a, segments[s].b}) {
      auto [it, inserted] = incident.try_emplace(e, std::array<int, 2>{-1, -1});
      (it->second[0] < 0 ? it->second[0] : it->second[1]) = s;
    }
  }

  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> lines;
  auto walk = [&](int start, std::int64_t from_edge) {
    Polyline line{edge_point(from_edge)};
    int seg = start;
    std::int64_t at = from_edge;
    while (seg >= 0 && !used[seg]) {
      used[seg] = true;
      const std::int64_t next = segments[seg].a == at ? segments[seg].b : segments[seg].a;
      line.push_back(edge_point(next));
      const auto& inc = incident[next];
      seg = inc[0] == seg ? inc[1] : inc[0];
      at = next;
    }
    lines.push_back(std::move(line));
  };

  // Open chains start at edges touched by a single segment (raster border).
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    if (used[s]) continue;
    if (incident[segments[s].a][1] < 0) {
      walk(s, segments[s].a);
    } else if (incident[segments[s].b][1] < 0) {
      walk(s, segments[s].b);
    }
  }
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    if (!used[s]) walk(s, segments[s].a);
  }
  return lines;
}

FieldOverlay make_overlay(const PerspectiveField& pf, int grid, std::span<const double> levels) {
  if (grid < kMinOverlayGrid) {
    throw std::invalid_argument(fmt::format("overlay grid must be at least {} px (got {})", kMinOverlayGrid, grid));
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= -90.0 && levels[i] <= 90.0)) {
      throw std::invalid_argument(fmt::format("contour level {:g} outside [-90, 90]", levels[i]));
    }
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw std::invalid_argument("contour levels must be strictly increasing");
    }
  }

  FieldOverlay overlay;
  overlay.grid = grid;
  if (pf.degenerate_count() == pf.up_data().size()) return overlay;

  for (int y = grid / 2; y < pf.height(); y += grid) {
    for (int x = grid / 2; x < pf.width(); x += grid) {
      if (pf.degenerate(x, y)) continue;
      const Vec2& u = pf.up(x, y);
      overlay.arrows.push_back({static_cast<double>(x), static_cast<double>(y), u.x(), u.y()});
    }
  }
  for (const double level : levels) {
    auto lines = marching_squares(pf.latitude_data(), pf.width(), pf.height(), level);
    if (!lines.empty()) overlay.contours.push_back({level, std::move(lines)});
  }
  return overlay;
}

}  // namespace pfcam
