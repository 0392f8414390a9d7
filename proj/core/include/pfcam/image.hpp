// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pfcam {

using Rgb = std::array<std::uint8_t, 3>;

/// Interleaved 8-bit RGB raster, row-major, no padding.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = {0, 0, 0});
  /// Wraps interleaved RGB bytes; throws if the size does not match.
  static RgbImage from_bytes(int width, int height, std::vector<std::uint8_t> data);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] Rgb at(int x, int y) const {
    const std::uint8_t* p = &data_[offset(x, y)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) {
    std::uint8_t* p = &data_[offset(x, y)];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  [[nodiscard]] std::span<const std::uint8_t> bytes() const noexcept { return data_; }
  [[nodiscard]] std::span<std::uint8_t> bytes() noexcept { return data_; }
  [[nodiscard]] std::span<std::uint8_t> row(int y) {
    return std::span(data_).subspan(offset(0, y), static_cast<std::size_t>(width_) * 3);
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  [[nodiscard]] std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Rendered panorama view.
using CropImage = RgbImage;

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decodes PNG or JPEG (detected from the signature) into 8-bit RGB.
/// Alpha is dropped, gray and palette images are expanded, 16-bit is reduced.
RgbImage decode_image(std::span<const std::uint8_t> encoded);
RgbImage read_image(const std::filesystem::path& path);

/// Width and height from a PNG header without decoding pixels.
/// Throws ImageIoError if the file is not a readable PNG.
std::array<int, 2> read_png_size(const std::filesystem::path& path);

/// 8-bit RGB PNG with only IHDR, IDAT and IEND chunks and fixed zlib
/// settings, so equal rasters always produce equal bytes.
std::vector<std::uint8_t> encode_png(const RgbImage& image);
void write_png(const std::filesystem::path& path, const RgbImage& image);

/// Reads a whole file; throws ImageIoError naming the path on failure.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pfcam
