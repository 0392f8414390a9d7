// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfcam/camera_model.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pfcam {

std::string ParamRange::describe() const {
  return fmt::format("{}{:g}, {:g}{}", lo_closed ? '[' : '(', lo, hi, hi_closed ? ']' : ')');
}

ParameterError::ParameterError(std::string param, ParamRange range, double value)
    : std::invalid_argument(
          fmt::format("{} = {:g} is outside the legal range {}", param, value, range.describe())),
      param_(std::move(param)),
      range_(range) {}

ParameterError::ParameterError(std::string param, std::string message)
    : std::invalid_argument(fmt::format("{}: {}", param, message)), param_(std::move(param)) {}

void CameraRig::validate(const RigParams& p) {
  auto check = [](const char* name, ParamRange range, double value) {
    if (!std::isfinite(value) || !range.contains(value)) throw ParameterError(name, range, value);
  };
  check("roll", limits::kRoll, p.roll_deg);
  check("pitch", limits::kPitch, p.pitch_deg);
  check("vfov", limits::kVfov, p.vfov_deg);
  check("xi", limits::kXi, p.xi);
  check("yaw", limits::kYaw, p.yaw_deg);
  if (p.width < limits::kMinDimension) {
    throw ParameterError("width", fmt::format("must be at least {} px (got {})", limits::kMinDimension, p.width));
  }
  if (p.height < limits::kMinDimension) {
    throw ParameterError("height", fmt::format("must be at least {} px (got {})", limits::kMinDimension, p.height));
  }
}

CameraRig::CameraRig(const RigParams& params) : p_(params) { validate(p_); }

Intrinsics intrinsics_from_rig(const CameraRig& rig) {
  const double half = deg2rad(rig.vfov_deg()) / 2.0;
  const double f = (rig.height() / 2.0) * (rig.xi() + std::cos(half)) / std::sin(half);
  return {f, (rig.width() - 1) / 2.0, (rig.height() - 1) / 2.0, rig.xi()};
}

std::optional<Pixel> project(const Vec3& p, const Intrinsics& intr) {
  const double norm = p.norm();
  const double denom = intr.xi * norm + p.z();
  if (denom <= 1e-9 * norm) return std::nullopt;
  const double s = intr.f / denom;
  return Pixel{p.x() * s + intr.u0, p.y() * s + intr.v0};
}

Ray unproject(Pixel px, const Intrinsics& intr) {
  const double mx = (px.u - intr.u0) / intr.f;
  const double my = (px.v - intr.v0) / intr.f;
  const double r2 = mx * mx + my * my;
  const double xi = intr.xi;
  const double t = (xi + std::sqrt(1.0 + r2 * (1.0 - xi * xi))) / (1.0 + r2);
  return Ray::from_direction({mx * t, my * t, t - xi});
}

Mat23 project_jacobian(const Vec3& p, const Intrinsics& intr) {
  const double n = p.norm();
  const double d = intr.xi * n + p.z();
  const double xi_n = intr.xi / n;
  // dd/dp = (xi*x/n, xi*y/n, xi*z/n + 1)
  const Vec3 dd{xi_n * p.x(), xi_n * p.y(), xi_n * p.z() + 1.0};
  const double f_d = intr.f / d;
  const double f_d2 = f_d / d;
  Mat23 j;
  j.row(0) = -f_d2 * p.x() * dd.transpose();
  j.row(1) = -f_d2 * p.y() * dd.transpose();
  j(0, 0) += f_d;
  j(1, 1) += f_d;
  return j;
}

Mat3 rig_rotation(double roll_deg, double pitch_deg, double yaw_deg) {
  const double r = deg2rad(roll_deg);
  const double p = deg2rad(pitch_deg);
  const double y = deg2rad(yaw_deg);
  Mat3 yaw;
  yaw << std::cos(y), 0, std::sin(y),  //
      0, 1, 0,                         //
      -std::sin(y), 0, std::cos(y);
  // About camera x: forward (0,0,1) tilts toward world up (-y) for p > 0.
  Mat3 pitch;
  pitch << 1, 0, 0,                 //
      0, std::cos(p), -std::sin(p),  //
      0, std::sin(p), std::cos(p);
  // About camera z by -roll.
  Mat3 roll;
  roll << std::cos(r), std::sin(r), 0,  //
      -std::sin(r), std::cos(r), 0,     //
      0, 0, 1;
  return yaw * pitch * roll;
}

Mat3 rig_rotation(const CameraRig& rig) { return rig_rotation(rig.roll_deg(), rig.pitch_deg(), rig.yaw_deg()); }

}  // namespace pfcam
