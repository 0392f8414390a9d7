// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pfcam/camera_model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace pfcam {

/// Pixels with |latitude| above this are masked; their up-vector is not
/// meaningful.
inline constexpr double kDegenerateLatitudeDeg = 89.9;

/// Fill value for masked pixels produced by compute_pf_map().
inline Vec2 degenerate_up_fill() { return {0.0, -1.0}; }

/// Per-pixel up-vectors (image coordinates, v downward) and latitudes in
/// degrees. The degenerate mask is derived from the latitudes on
/// construction and cannot be set independently.
class PerspectiveField {
 public:
  PerspectiveField(int width, int height, std::vector<Vec2> up, std::vector<double> latitude_deg);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }

  [[nodiscard]] const Vec2& up(int x, int y) const { return up_[index(x, y)]; }
  [[nodiscard]] double latitude(int x, int y) const { return latitude_[index(x, y)]; }
  [[nodiscard]] bool degenerate(int x, int y) const { return mask_[index(x, y)] != 0; }

  [[nodiscard]] const std::vector<Vec2>& up_data() const noexcept { return up_; }
  [[nodiscard]] const std::vector<double>& latitude_data() const noexcept { return latitude_; }
  [[nodiscard]] const std::vector<std::uint8_t>& mask_data() const noexcept { return mask_; }

  [[nodiscard]] std::size_t degenerate_count() const;
  /// Latitude at the raster center (bilinear when the size is even).
  [[nodiscard]] double center_latitude() const;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Vec2> up_;
  std::vector<double> latitude_;
  std::vector<std::uint8_t> mask_;
};

/// Angle in degrees between the pixel's world ray and the horizontal plane,
/// positive above the horizon.
double latitude_at(Pixel px, const CameraRig& rig);

/// Projected world-up direction at a pixel, from the exact Jacobian of the
/// projection. nullopt when the ray is parallel to the vertical axis.
std::optional<Vec2> up_vector_analytic(Pixel px, const CameraRig& rig);

/// Forward-difference evaluation of the same quantity: the scene point sits
/// at unit distance along the ray and is displaced by `step` along world up.
/// Reference path for validating up_vector_analytic().
std::optional<Vec2> up_vector_fd(Pixel px, const CameraRig& rig, double step = 1e-6);

/// Dense field over the rig's raster. Masked pixels carry degenerate_up_fill().
PerspectiveField compute_pf_map(const CameraRig& rig);

}  // namespace pfcam
