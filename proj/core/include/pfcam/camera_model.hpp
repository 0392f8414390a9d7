// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pfcam {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;

// Camera frame: x right, y down, z forward. The world frame shares the
// handedness and its up axis is -y, so gravity points along +y.
inline Vec3 world_up() { return {0.0, -1.0, 0.0}; }

/// A scalar interval with independently open or closed ends.
struct ParamRange {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;

  [[nodiscard]] bool contains(double x) const {
    const bool above = lo_closed ? x >= lo : x > lo;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
  }
  /// Interval notation, e.g. "(-90, 90)" or "[15, 140]".
  [[nodiscard]] std::string describe() const;
};

namespace limits {
inline constexpr ParamRange kRoll{-90.0, 90.0, false, false};
inline constexpr ParamRange kPitch{-90.0, 90.0, false, false};
inline constexpr ParamRange kVfov{15.0, 140.0, true, true};
inline constexpr ParamRange kXi{0.0, 1.0, true, true};
inline constexpr ParamRange kYaw{0.0, 360.0, true, false};
inline constexpr int kMinDimension = 2;
}  // namespace limits

/// Raised when a rig or query parameter falls outside its legal range.
/// Carries the parameter name and range so front ends can report both.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string param, ParamRange range, double value);
  ParameterError(std::string param, std::string message);

  [[nodiscard]] const std::string& param() const noexcept { return param_; }
  [[nodiscard]] const std::optional<ParamRange>& range() const noexcept { return range_; }

 private:
  std::string param_;
  std::optional<ParamRange> range_;
};

struct RigParams {
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double vfov_deg = 80.0;
  double xi = 0.0;
  double yaw_deg = 0.0;
  int width = 1024;
  int height = 1024;
};

/// Roll, pitch, vertical field of view and distortion, plus the yaw used
/// to anchor a view inside a panorama and the output raster size. Always
/// valid: construction throws ParameterError for out-of-range values.
class CameraRig {
 public:
  explicit CameraRig(const RigParams& params);

  [[nodiscard]] double roll_deg() const noexcept { return p_.roll_deg; }
  [[nodiscard]] double pitch_deg() const noexcept { return p_.pitch_deg; }
  [[nodiscard]] double vfov_deg() const noexcept { return p_.vfov_deg; }
  [[nodiscard]] double xi() const noexcept { return p_.xi; }
  [[nodiscard]] double yaw_deg() const noexcept { return p_.yaw_deg; }
  [[nodiscard]] int width() const noexcept { return p_.width; }
  [[nodiscard]] int height() const noexcept { return p_.height; }
  [[nodiscard]] const RigParams& params() const noexcept { return p_; }

  /// Throws ParameterError naming the first offending field.
  static void validate(const RigParams& params);

 private:
  RigParams p_;
};

struct Intrinsics {
  double f;
  double u0;
  double v0;
  double xi;
};

struct Pixel {
  double u;
  double v;
};

/// Unit-norm viewing direction.
class Ray {
 public:
  /// Normalizes `d`; `d` must be non-zero.
  static Ray from_direction(const Vec3& d) { return Ray(d.normalized()); }

  [[nodiscard]] const Vec3& dir() const noexcept { return d_; }
  [[nodiscard]] double dx() const noexcept { return d_.x(); }
  [[nodiscard]] double dy() const noexcept { return d_.y(); }
  [[nodiscard]] double dz() const noexcept { return d_.z(); }

 private:
  explicit Ray(const Vec3& d) : d_(d) {}
  Vec3 d_;
};

/// Focal length chosen so that the ray vfov/2 off-axis in the vertical plane
/// lands exactly height/2 from the principal point under the unified
/// spherical model; principal point at the raster center.
Intrinsics intrinsics_from_rig(const CameraRig& rig);

/// Unified spherical projection of a camera-frame point. Returns nullopt
/// when xi*|p| + z <= 1e-9*|p| (outside the model's valid cone).
std::optional<Pixel> project(const Vec3& p, const Intrinsics& intr);

/// Closed-form inverse of project() for xi in [0, 1].
Ray unproject(Pixel px, const Intrinsics& intr);

/// d(u, v)/d(x, y, z) of project() at `p`. Undefined outside the valid cone.
Mat23 project_jacobian(const Vec3& p, const Intrinsics& intr);

/// Camera-to-world rotation R = R_yaw * R_pitch * R_roll. Positive pitch
/// looks up, positive roll turns the projected up-vector clockwise on screen.
Mat3 rig_rotation(const CameraRig& rig);
Mat3 rig_rotation(double roll_deg, double pitch_deg, double yaw_deg);

/// Precomputed intrinsics and rotation for per-pixel loops.
struct CameraView {
  explicit CameraView(const CameraRig& rig)
      : intr(intrinsics_from_rig(rig)), rotation(rig_rotation(rig)) {}

  [[nodiscard]] Vec3 world_ray(Pixel px) const { return rotation * unproject(px, intr).dir(); }

  Intrinsics intr;
  Mat3 rotation;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

}  // namespace pfcam
