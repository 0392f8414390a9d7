// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfcam/panorama.hpp"

#include "pfcam/parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace pfcam {

Panorama::Panorama(std::string id, RgbImage pixels)
    : id_(std::move(id)), pixels_(std::move(pixels)), aspect_warning_(pixels_.width() != 2 * pixels_.height()) {
  if (pixels_.width() < 2 || pixels_.height() < 1) throw ImageIoError("panorama '" + id_ + "' is too small");
  if (aspect_warning_) {
    spdlog::warn("panorama '{}' is {}x{}, not 2:1; sampling it as equirectangular anyway", id_, pixels_.width(),
                 pixels_.height());
  }
}

Panorama Panorama::load(const std::filesystem::path& path, std::string id) {
  if (id.empty()) id = path.stem().string();
  return Panorama(std::move(id), read_image(path));
}

Rgb Panorama::sample(double u, double v) const {
  const int w = width();
  const int h = height();
  const double sx = u - 0.5;
  const double sy = std::clamp(v - 0.5, 0.0, static_cast<double>(h - 1));

  const double fx0 = std::floor(sx);
  const double tx = sx - fx0;
  int x0 = static_cast<int>(std::fmod(fx0, static_cast<double>(w)));
  if (x0 < 0) x0 += w;
  const int x1 = x0 + 1 == w ? 0 : x0 + 1;

  const int y0 = static_cast<int>(std::floor(sy));
  const int y1 = std::min(y0 + 1, h - 1);
  const double ty = sy - y0;

  const Rgb a = pixels_.at(x0, y0);
  const Rgb b = pixels_.at(x1, y0);
  const Rgb c = pixels_.at(x0, y1);
  const Rgb d = pixels_.at(x1, y1);
  Rgb out;
  for (int k = 0; k < 3; ++k) {
    const double top = a[k] + (b[k] - a[k]) * tx;
    const double bottom = c[k] + (d[k] - c[k]) * tx;
    const double value = top + (bottom - top) * ty;
    out[k] = static_cast<std::uint8_t>(std::clamp(std::floor(value + 0.5), 0.0, 255.0));
  }
  return out;
}

EquirectCoords equirect_coords(const Ray& dir, int width, int height) {
  const double lon = std::atan2(dir.dx(), dir.dz());
  const double lat = std::asin(std::clamp(-dir.dy(), -1.0, 1.0));
  return {(lon / (2.0 * kPi) + 0.5) * width, (0.5 - lat / kPi) * height};
}

Rgb equirect_lookup(const Ray& dir, const Panorama& pano) {
  const auto c = equirect_coords(dir, pano.width(), pano.height());
  return pano.sample(c.u, c.v);
}

CropImage render_crop(const CameraRig& rig, const Panorama& pano) {
  const CameraView view(rig);
  CropImage out(rig.width(), rig.height());
  parallel_rows(rig.height(), [&](int y) {
    for (int x = 0; x < rig.width(); ++x) {
      const Ray ray = Ray::from_direction(view.world_ray({static_cast<double>(x), static_cast<double>(y)}));
      out.set(x, y, equirect_lookup(ray, pano));
    }
  });
  return out;
}

}  // namespace pfcam
