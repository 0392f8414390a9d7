// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfcam/perspective_field.hpp"

#include "oracles.hpp"
#include "pfcam/parallel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace pfcam {
namespace {

CameraRig rig_with(double roll, double pitch, double vfov, double xi, int w = 64, int h = 64) {
  return CameraRig({roll, pitch, vfov, xi, 0.0, w, h});
}

Pixel center_of(const CameraRig& rig) { return {(rig.width() - 1) / 2.0, (rig.height() - 1) / 2.0}; }

TEST(LatitudeTest, CenterPixelOnHorizonAtZeroPitch) {
  for (const double roll : {-70.0, 0.0, 45.0}) {
    for (const double vfov : {15.0, 90.0, 140.0}) {
      for (const double xi : {0.0, 0.5, 1.0}) {
        const auto rig = rig_with(roll, 0, vfov, xi);
        EXPECT_NEAR(latitude_at(center_of(rig), rig), 0.0, 1e-12);
      }
    }
  }
}

TEST(LatitudeTest, CenterPixelEqualsPitch) {
  const auto rig = rig_with(10, 30, 80, 0.2);
  EXPECT_NEAR(latitude_at(center_of(rig), rig), 30.0, 1e-12);
}

TEST(LatitudeTest, TopCenterPixelNearHalfField) {
  // Pixel row 0 sits half a pixel inside the top edge, so the exact value is
  // atan(511.5 / 512) rather than 45 degrees.
  const auto rig = rig_with(0, 0, 90, 0, 1024, 1024);
  const double lat = latitude_at({511.5, 0.0}, rig);
  EXPECT_NEAR(lat, rad2deg(std::atan(511.5 / 512.0)), 1e-12);
  EXPECT_NEAR(lat, 45.0, 0.03);
  // The raster edge itself is exactly the half field of view.
  EXPECT_NEAR(latitude_at({511.5, -0.5}, rig), 45.0, 1e-12);
}

TEST(UpVectorTest, UprightCameraPointsUp) {
  const auto rig = rig_with(0, 0, 80, 0.3);
  const auto up = up_vector_analytic(center_of(rig), rig);
  ASSERT_TRUE(up);
  EXPECT_NEAR(up->x(), 0.0, 1e-15);
  EXPECT_NEAR(up->y(), -1.0, 1e-15);
}

TEST(UpVectorTest, RollConventionAtCenter) {
  for (const double roll : {-89.9999, -45.0, 20.0, 89.9999}) {
    const auto rig = rig_with(roll, 0, 80, 0.6);
    const auto up = up_vector_analytic(center_of(rig), rig);
    ASSERT_TRUE(up);
    EXPECT_NEAR(up->x(), std::sin(deg2rad(roll)), 1e-12);
    EXPECT_NEAR(up->y(), -std::cos(deg2rad(roll)), 1e-12);
  }
  // Near 90 degrees the up-vector approaches (1, 0).
  const auto rig = rig_with(89.9999, 0, 80, 0.0);
  const auto up = up_vector_analytic(center_of(rig), rig);
  EXPECT_NEAR(up->x(), 1.0, 1e-9);
  EXPECT_NEAR(up->y(), 0.0, 1e-5);
}

TEST(UpVectorTest, FiniteDifferenceIdentityRig) {
  const auto rig = rig_with(0, 0, 80, 0);
  const auto up = up_vector_fd(center_of(rig), rig);
  ASSERT_TRUE(up);
  EXPECT_NEAR(up->x(), 0.0, 1e-9);
  EXPECT_NEAR(up->y(), -1.0, 1e-9);
}

TEST(UpVectorTest, FiniteDifferenceIsUnitNorm) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto rig = oracle::random_rig(rng, 96, 64);
    for (int y = 0; y < 64; y += 9) {
      for (int x = 0; x < 96; x += 9) {
        if (const auto up = up_vector_fd({double(x), double(y)}, rig)) EXPECT_NEAR(up->norm(), 1.0, 1e-12);
      }
    }
  }
}

TEST(UpVectorTest, AnalyticMatchesFiniteDifference) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 30; ++i) {
    const auto rig = oracle::random_rig(rng, 48, 48);
    for (int y = 0; y < 48; y += 3) {
      for (int x = 0; x < 48; x += 3) {
        const Pixel px{double(x), double(y)};
        if (std::abs(latitude_at(px, rig)) > kDegenerateLatitudeDeg) continue;
        const auto a = up_vector_analytic(px, rig);
        const auto f = up_vector_fd(px, rig);
        ASSERT_TRUE(a && f);
        EXPECT_GT(a->dot(*f), 1.0 - 1e-6) << "rig roll=" << rig.roll_deg() << " pitch=" << rig.pitch_deg();
      }
    }
  }
}

TEST(UpVectorTest, DegenerateAtZenith) {
  // Looking almost straight up: the optical axis is within 0.001 deg of the
  // zenith, but the zenith ray lies between pixels; query it directly.
  const auto rig = rig_with(0, 89.999, 60, 0.0, 65, 65);
  const CameraView view(rig);
  const Vec3 zenith_cam = view.rotation.transpose() * world_up();
  const auto px = project(zenith_cam, view.intr);
  ASSERT_TRUE(px);
  EXPECT_FALSE(up_vector_analytic(*px, rig).has_value());
}

TEST(PfMapTest, IdentityRigSymmetricAboutCenterRow) {
  const auto rig = rig_with(0, 0, 80, 0.4, 64, 48);
  const auto pf = compute_pf_map(rig);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      EXPECT_NEAR(pf.latitude(x, y), -pf.latitude(x, 47 - y), 1e-9);
    }
  }
}

TEST(PfMapTest, HorizonIsCenterRowAtZeroPitch) {
  const auto rig = rig_with(0, 0, 100, 0.7, 33, 33);
  const auto pf = compute_pf_map(rig);
  for (int x = 0; x < 33; ++x) {
    EXPECT_NEAR(pf.latitude(x, 16), 0.0, 1e-12);
    EXPECT_GT(pf.latitude(x, 15), 0.0);
    EXPECT_LT(pf.latitude(x, 17), 0.0);
  }
}

TEST(PfMapTest, MatchesScalarOperations) {
  const auto rig = rig_with(30, 20, 80, 0.1, 512, 512);
  const auto pf = compute_pf_map(rig);
  for (int y = 0; y < 512; ++y) {
    for (int x = 0; x < 512; ++x) {
      const Pixel px{double(x), double(y)};
      ASSERT_EQ(pf.latitude(x, y), latitude_at(px, rig));
      const auto up = up_vector_analytic(px, rig);
      ASSERT_TRUE(up);
      ASSERT_EQ(pf.up(x, y), *up);
    }
  }
  EXPECT_EQ(pf.degenerate_count(), 0u);
}

TEST(PfMapTest, UnitNormBoundsAndMask) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 40; ++i) {
    const auto rig = oracle::random_rig(rng, 40, 30);
    const auto pf = compute_pf_map(rig);
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 40; ++x) {
        const double lat = pf.latitude(x, y);
        ASSERT_FALSE(std::isnan(lat));
        ASSERT_GE(lat, -90.0);
        ASSERT_LE(lat, 90.0);
        ASSERT_EQ(pf.degenerate(x, y), std::abs(lat) > kDegenerateLatitudeDeg);
        if (!pf.degenerate(x, y)) ASSERT_NEAR(pf.up(x, y).norm(), 1.0, 1e-9);
      }
    }
  }
}

TEST(PfMapTest, DegeneratePixelsAreFilled) {
  // Looking straight up with a wide field puts the zenith inside the frame.
  const auto rig = rig_with(0, 89.99, 140, 0.5, 201, 201);
  const auto pf = compute_pf_map(rig);
  ASSERT_GT(pf.degenerate_count(), 0u);
  for (int y = 0; y < 201; ++y) {
    for (int x = 0; x < 201; ++x) {
      if (pf.degenerate(x, y)) EXPECT_EQ(pf.up(x, y), degenerate_up_fill());
    }
  }
}

TEST(PfMapTest, ThreadCountDoesNotChangeOutput) {
  const auto rig = rig_with(12, -33, 120, 0.8, 123, 77);
  set_thread_count(1);
  const auto a = compute_pf_map(rig);
  set_thread_count(4);
  const auto b = compute_pf_map(rig);
  set_thread_count(0);
  EXPECT_EQ(a.up_data(), b.up_data());
  EXPECT_EQ(a.latitude_data(), b.latitude_data());
}

TEST(DistortionTest, LargerXiShrinksProjectedRadius) {
  const double f = 400.0;
  for (const double theta_deg : {5.0, 30.0, 60.0, 85.0}) {
    const Vec3 p{std::sin(deg2rad(theta_deg)) * std::cos(0.3), std::sin(deg2rad(theta_deg)) * std::sin(0.3),
                 std::cos(deg2rad(theta_deg))};
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 20; ++k) {
      const Intrinsics intr{f, 100, 100, k / 20.0};
      const auto px = project(p, intr);
      ASSERT_TRUE(px);
      const double radius = std::hypot(px->u - 100, px->v - 100);
      EXPECT_LT(radius, previous);
      previous = radius;
    }
  }
}

TEST(PerspectiveFieldTest, RejectsMismatchedBuffers) {
  EXPECT_THROW(PerspectiveField(4, 4, std::vector<Vec2>(15), std::vector<double>(16)), std::invalid_argument);
}

}  // namespace
}  // namespace pfcam
