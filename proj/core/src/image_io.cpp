// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfcam/image.hpp"

#include <fmt/format.h>
#include <jpeglib.h>
#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace pfcam {

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw std::invalid_argument("RgbImage: negative dimensions");
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

RgbImage RgbImage::from_bytes(int width, int height, std::vector<std::uint8_t> data) {
  if (width < 0 || height < 0 ||
      data.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
    throw std::invalid_argument("RgbImage: buffer size does not match dimensions");
  }
  RgbImage img;
  img.width_ = width;
  img.height_ = height;
  img.data_ = std::move(data);
  return img;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw ImageIoError(fmt::format("error reading '{}'", path.string()));
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageIoError(fmt::format("cannot create '{}'", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageIoError(fmt::format("error writing '{}'", path.string()));
}

namespace {

// ---------------------------------------------------------------------------
// PNG

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

struct PngErrorState {
  char message[256] = "libpng error";
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

struct PngMemoryReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void png_read_fn(png_structp png, png_bytep out, png_size_t n) {
  auto* r = static_cast<PngMemoryReader*>(png_get_io_ptr(png));
  if (r->pos + n > r->size) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, r->data + r->pos, n);
  r->pos += n;
}

class PngReadHandle {
 public:
  PngReadHandle() {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err_, png_error_fn, png_warning_fn);
    if (png_) info_ = png_create_info_struct(png_);
    if (!png_ || !info_) throw ImageIoError("libpng: out of memory");
  }
  ~PngReadHandle() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReadHandle(const PngReadHandle&) = delete;
  PngReadHandle& operator=(const PngReadHandle&) = delete;

  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
  PngErrorState err_;
};

// setjmp regions hold only trivially destructible locals.
bool png_read_header(PngReadHandle& h, PngMemoryReader* reader, png_uint_32* w, png_uint_32* ht) {
  if (setjmp(png_jmpbuf(h.png_))) return false;
  png_set_read_fn(h.png_, reader, png_read_fn);
  png_read_info(h.png_, h.info_);
  png_set_expand(h.png_);
  png_set_strip_16(h.png_);
  png_set_strip_alpha(h.png_);
  png_set_gray_to_rgb(h.png_);
  png_set_interlace_handling(h.png_);
  png_read_update_info(h.png_, h.info_);
  *w = png_get_image_width(h.png_, h.info_);
  *ht = png_get_image_height(h.png_, h.info_);
  return png_get_rowbytes(h.png_, h.info_) == static_cast<png_size_t>(*w) * 3;
}

bool png_read_pixels(PngReadHandle& h, png_bytepp rows) {
  if (setjmp(png_jmpbuf(h.png_))) return false;
  png_read_image(h.png_, rows);
  png_read_end(h.png_, nullptr);
  return true;
}

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  PngReadHandle h;
  PngMemoryReader reader{bytes.data(), bytes.size(), 0};
  png_uint_32 w = 0;
  png_uint_32 ht = 0;
  if (!png_read_header(h, &reader, &w, &ht)) throw ImageIoError(fmt::format("PNG: {}", h.err_.message));
  if (w == 0 || ht == 0 || w > (1u << 16) || ht > (1u << 16)) throw ImageIoError("PNG: unsupported dimensions");
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * ht * 3);
  std::vector<png_bytep> rows(ht);
  for (png_uint_32 y = 0; y < ht; ++y) rows[y] = data.data() + static_cast<std::size_t>(y) * w * 3;
  if (!png_read_pixels(h, rows.data())) throw ImageIoError(fmt::format("PNG: {}", h.err_.message));
  return RgbImage::from_bytes(static_cast<int>(w), static_cast<int>(ht), std::move(data));
}

void png_write_fn(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

void png_flush_fn(png_structp) {}

class PngWriteHandle {
 public:
  PngWriteHandle() {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err_, png_error_fn, png_warning_fn);
    if (png_) info_ = png_create_info_struct(png_);
    if (!png_ || !info_) throw ImageIoError("libpng: out of memory");
  }
  ~PngWriteHandle() { png_destroy_write_struct(&png_, &info_); }
  PngWriteHandle(const PngWriteHandle&) = delete;
  PngWriteHandle& operator=(const PngWriteHandle&) = delete;

  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
  PngErrorState err_;
};

bool png_write_all(PngWriteHandle& h, std::vector<std::uint8_t>* out, png_uint_32 w, png_uint_32 ht,
                   png_bytepp rows) {
  if (setjmp(png_jmpbuf(h.png_))) return false;
  png_set_write_fn(h.png_, out, png_write_fn, png_flush_fn);
  png_set_IHDR(h.png_, h.info_, w, ht, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(h.png_, 6);
  png_set_compression_strategy(h.png_, 0);  // Z_DEFAULT_STRATEGY
  png_set_filter(h.png_, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB | PNG_FILTER_UP | PNG_FILTER_PAETH);
  png_write_info(h.png_, h.info_);
  png_write_image(h.png_, rows);
  png_write_end(h.png_, nullptr);
  return true;
}

// ---------------------------------------------------------------------------
// JPEG

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_silent(j_common_ptr, int) {}

class JpegReadHandle {
 public:
  JpegReadHandle() {
    cinfo_.err = jpeg_std_error(&err_.pub);
    err_.pub.error_exit = jpeg_error_exit;
    err_.pub.emit_message = jpeg_silent;
    std::snprintf(err_.message, sizeof(err_.message), "libjpeg error");
  }
  ~JpegReadHandle() {
    if (created_) jpeg_destroy_decompress(&cinfo_);
  }
  JpegReadHandle(const JpegReadHandle&) = delete;
  JpegReadHandle& operator=(const JpegReadHandle&) = delete;

  jpeg_decompress_struct cinfo_{};
  JpegErrorManager err_{};
  bool created_ = false;
};

bool jpeg_read_header_rgb(JpegReadHandle& h, const std::uint8_t* data, unsigned long size) {
  if (setjmp(h.err_.jump)) return false;
  jpeg_create_decompress(&h.cinfo_);
  h.created_ = true;
  jpeg_mem_src(&h.cinfo_, data, size);
  jpeg_read_header(&h.cinfo_, TRUE);
  h.cinfo_.out_color_space = JCS_RGB;
  jpeg_start_decompress(&h.cinfo_);
  return h.cinfo_.output_components == 3;
}

bool jpeg_read_pixels(JpegReadHandle& h, std::uint8_t* out) {
  if (setjmp(h.err_.jump)) return false;
  const std::size_t stride = static_cast<std::size_t>(h.cinfo_.output_width) * 3;
  while (h.cinfo_.output_scanline < h.cinfo_.output_height) {
    JSAMPROW row = out + static_cast<std::size_t>(h.cinfo_.output_scanline) * stride;
    jpeg_read_scanlines(&h.cinfo_, &row, 1);
  }
  jpeg_finish_decompress(&h.cinfo_);
  return true;
}

RgbImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  JpegReadHandle h;
  if (!jpeg_read_header_rgb(h, bytes.data(), static_cast<unsigned long>(bytes.size()))) {
    throw ImageIoError(fmt::format("JPEG: {}", h.err_.message));
  }
  const auto w = h.cinfo_.output_width;
  const auto ht = h.cinfo_.output_height;
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * ht * 3);
  if (!jpeg_read_pixels(h, data.data())) throw ImageIoError(fmt::format("JPEG: {}", h.err_.message));
  return RgbImage::from_bytes(static_cast<int>(w), static_cast<int>(ht), std::move(data));
}

}  // namespace

RgbImage decode_image(std::span<const std::uint8_t> encoded) {
  if (encoded.size() >= 8 && std::memcmp(encoded.data(), kPngSignature, 8) == 0) return decode_png(encoded);
  if (encoded.size() >= 3 && encoded[0] == 0xFF && encoded[1] == 0xD8 && encoded[2] == 0xFF) {
    return decode_jpeg(encoded);
  }
  throw ImageIoError("unrecognized image format (expected PNG or JPEG)");
}

RgbImage read_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_file(path));
  } catch (const ImageIoError& e) {
    throw ImageIoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::array<int, 2> read_png_size(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint8_t head[24] = {};
  if (!in || !in.read(reinterpret_cast<char*>(head), sizeof(head)) || std::memcmp(head, kPngSignature, 8) != 0 ||
      std::memcmp(head + 12, "IHDR", 4) != 0) {
    throw ImageIoError(fmt::format("'{}' is not a readable PNG", path.string()));
  }
  auto be32 = [&](int at) {
    return static_cast<int>((std::uint32_t{head[at]} << 24) | (std::uint32_t{head[at + 1]} << 16) |
                            (std::uint32_t{head[at + 2]} << 8) | std::uint32_t{head[at + 3]});
  };
  return {be32(16), be32(20)};
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  if (image.empty()) throw ImageIoError("cannot encode an empty image");
  PngWriteHandle h;
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(image.width()) * image.height() + 1024);
  std::vector<png_bytep> rows(image.height());
  auto& pixels = const_cast<RgbImage&>(image);  // libpng takes non-const row pointers but does not write
  for (int y = 0; y < image.height(); ++y) rows[y] = pixels.row(y).data();
  if (!png_write_all(h, &out, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()),
                     rows.data())) {
    throw ImageIoError(fmt::format("PNG: {}", h.err_.message));
  }
  return out;
}

void write_png(const std::filesystem::path& path, const RgbImage& image) { write_file(path, encode_png(image)); }

}  // namespace pfcam
