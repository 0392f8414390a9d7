// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pfcam/camera_model.hpp"
#include "pfcam/image.hpp"

#include <filesystem>
#include <string>

namespace pfcam {

/// Full-sphere equirectangular image. Row 0 is the zenith, the center row
/// the horizon, and column width/2 looks along yaw 0 (+z).
class Panorama {
 public:
  Panorama(std::string id, RgbImage pixels);

  /// Reads a PNG or JPEG; the id defaults to the file stem.
  static Panorama load(const std::filesystem::path& path, std::string id = {});

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] int width() const noexcept { return pixels_.width(); }
  [[nodiscard]] int height() const noexcept { return pixels_.height(); }
  [[nodiscard]] const RgbImage& pixels() const noexcept { return pixels_; }

  /// True when the raster is not exactly 2:1. Such inputs are still usable.
  [[nodiscard]] bool aspect_warning() const noexcept { return aspect_warning_; }

  /// Bilinear sample at continuous coordinates where pixel (i, j) covers
  /// [i, i+1) x [j, j+1). Columns wrap, rows clamp to the poles.
  [[nodiscard]] Rgb sample(double u, double v) const;

 private:
  std::string id_;
  RgbImage pixels_;
  bool aspect_warning_;
};

struct EquirectCoords {
  double u;
  double v;
};

/// lon = atan2(dx, dz), lat = asin(-dy);
/// u = (lon/360 + 0.5) * width, v = (0.5 - lat/180) * height.
EquirectCoords equirect_coords(const Ray& dir, int width, int height);

Rgb equirect_lookup(const Ray& dir, const Panorama& pano);

/// Per output pixel: world ray = rig_rotation * unproject(pixel), colored by
/// equirect_lookup(). Rows are rendered in parallel; output does not depend
/// on the thread count.
CropImage render_crop(const CameraRig& rig, const Panorama& pano);

}  // namespace pfcam
