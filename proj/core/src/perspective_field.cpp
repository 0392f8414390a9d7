// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfcam/perspective_field.hpp"

#include "pfcam/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfcam {

PerspectiveField::PerspectiveField(int width, int height, std::vector<Vec2> up, std::vector<double> latitude_deg)
    : width_(width), height_(height), up_(std::move(up)), latitude_(std::move(latitude_deg)) {
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (width <= 0 || height <= 0 || up_.size() != n || latitude_.size() != n) {
    throw std::invalid_argument("PerspectiveField: buffer sizes do not match the raster");
  }
  mask_.resize(n);
  for (std::size_t i = 0; i < n; ++i) mask_[i] = std::abs(latitude_[i]) > kDegenerateLatitudeDeg ? 1 : 0;
}

std::size_t PerspectiveField::degenerate_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

double PerspectiveField::center_latitude() const {
  const int x0 = (width_ - 1) / 2;
  const int y0 = (height_ - 1) / 2;
  const int x1 = width_ / 2;
  const int y1 = height_ / 2;
  return 0.25 * (latitude(x0, y0) + latitude(x1, y0) + latitude(x0, y1) + latitude(x1, y1));
}

namespace {

double latitude_of(const Vec3& world_ray) {
  const double s = std::clamp(world_ray.dot(world_up()), -1.0, 1.0);
  return rad2deg(std::asin(s));
}

std::optional<Vec2> analytic_up(const CameraView& view, const Vec3& ray_cam) {
  const Vec3 up_cam = view.rotation.transpose() * world_up();
  // J * ray = 0, so only the tangential part of up_cam contributes.
  const Vec2 d = project_jacobian(ray_cam, view.intr) * up_cam;
  const double n = d.norm();
  if (n / view.intr.f < 1e-12) return std::nullopt;
  return Vec2(d / n);
}

}  // namespace

double latitude_at(Pixel px, const CameraRig& rig) { return latitude_of(CameraView(rig).world_ray(px)); }

std::optional<Vec2> up_vector_analytic(Pixel px, const CameraRig& rig) {
  const CameraView view(rig);
  return analytic_up(view, unproject(px, view.intr).dir());
}

std::optional<Vec2> up_vector_fd(Pixel px, const CameraRig& rig, double step) {
  const Intrinsics intr = intrinsics_from_rig(rig);
  const Mat3 cam_to_world = rig_rotation(rig);
  const Mat3 world_to_cam = cam_to_world.transpose();

  const Vec3 x_world = cam_to_world * unproject(px, intr).dir();
  const Vec3 moved_world = x_world + step * world_up();

  const auto a = project(world_to_cam * x_world, intr);
  const auto b = project(world_to_cam * moved_world, intr);
  if (!a || !b) return std::nullopt;
  const Vec2 d{b->u - a->u, b->v - a->v};
  const double n = d.norm();
  if (n < 1e-12) return std::nullopt;
  return Vec2(d / n);
}

PerspectiveField compute_pf_map(const CameraRig& rig) {
  const int w = rig.width();
  const int h = rig.height();
  const CameraView view(rig);
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<Vec2> up(n);
  std::vector<double> lat(n);

  parallel_rows(h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      const Vec3 ray_cam = unproject({static_cast<double>(x), static_cast<double>(y)}, view.intr).dir();
      lat[i] = latitude_of(view.rotation * ray_cam);
      if (std::abs(lat[i]) > kDegenerateLatitudeDeg) {
        up[i] = degenerate_up_fill();
        continue;
      }
      up[i] = analytic_up(view, ray_cam).value_or(degenerate_up_fill());
    }
  });
  return PerspectiveField(w, h, std::move(up), std::move(lat));
}

}  // namespace pfcam
