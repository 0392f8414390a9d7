// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pfcam/image.hpp"
#include "pfcam/perspective_field.hpp"

#include <cstdint>

namespace pfcam {

/// 8-bit RGB conditioning image: R, G carry the up-vector components mapped
/// from [-1, 1] to [0, 255], B the latitude mapped from [-90, 90] to [0, 255].
using EncodedPFMap = RgbImage;

/// Rounds half away from zero, then clamps to [0, 255].
std::uint8_t quantize_channel(double scaled);

Rgb encode_pixel(const Vec2& up, double latitude_deg);

EncodedPFMap encode(const PerspectiveField& pf);

/// Inverse affine maps. Up-vectors are renormalized when their norm exceeds
/// 1e-6; the degenerate mask is recomputed from the decoded latitude.
PerspectiveField decode(const EncodedPFMap& img);

}  // namespace pfcam
