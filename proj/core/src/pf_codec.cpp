// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfcam/pf_codec.hpp"

#include "pfcam/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace pfcam {

std::uint8_t quantize_channel(double scaled) {
  const double r = std::round(scaled);  // half away from zero
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

Rgb encode_pixel(const Vec2& up, double latitude_deg) {
  return {quantize_channel((up.x() + 1.0) / 2.0 * 255.0), quantize_channel((up.y() + 1.0) / 2.0 * 255.0),
          quantize_channel((latitude_deg + 90.0) / 180.0 * 255.0)};
}

EncodedPFMap encode(const PerspectiveField& pf) {
  EncodedPFMap img(pf.width(), pf.height());
  parallel_rows(pf.height(), [&](int y) {
    for (int x = 0; x < pf.width(); ++x) img.set(x, y, encode_pixel(pf.up(x, y), pf.latitude(x, y)));
  });
  return img;
}

PerspectiveField decode(const EncodedPFMap& img) {
  const auto n = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(img.height());
  std::vector<Vec2> up(n);
  std::vector<double> lat(n);
  const auto bytes = img.bytes();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 u{2.0 * bytes[3 * i] / 255.0 - 1.0, 2.0 * bytes[3 * i + 1] / 255.0 - 1.0};
    const double norm = u.norm();
    if (norm > 1e-6) u /= norm;
    up[i] = u;
    lat[i] = bytes[3 * i + 2] / 255.0 * 180.0 - 90.0;
  }
  return PerspectiveField(img.width(), img.height(), std::move(up), std::move(lat));
}

}  // namespace pfcam
