// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

// pfcam: perspective-field maps, panorama crops and conditioning datasets.
//
// Exit codes: 0 success, 1 usage error (bad flag or out-of-range value),
// 2 runtime error (I/O, decoding, empty input).

#include "pfcam/camera_model.hpp"
#include "pfcam/dataset.hpp"
#include "pfcam/overlay.hpp"
#include "pfcam/panorama.hpp"
#include "pfcam/parallel.hpp"
#include "pfcam/perspective_field.hpp"
#include "pfcam/pf_codec.hpp"
#include "pfcam/version.hpp"
#include "preview_service.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using namespace pfcam;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RigFlags {
  double roll = 0.0;
  double pitch = 0.0;
  double vfov = 80.0;
  double xi = 0.0;
  double yaw = 0.0;
  std::string size = "1024x1024";
};

std::string range_text(const ParamRange& r) { return r.describe(); }

void add_rig_flags(CLI::App& cmd, RigFlags& f, bool with_yaw) {
  cmd.add_option("--roll", f.roll, "Roll in degrees, " + range_text(limits::kRoll))->capture_default_str();
  cmd.add_option("--pitch", f.pitch, "Pitch in degrees, positive looks up, " + range_text(limits::kPitch))
      ->capture_default_str();
  cmd.add_option("--vfov", f.vfov, "Vertical field of view in degrees, " + range_text(limits::kVfov))
      ->capture_default_str();
  cmd.add_option("--xi", f.xi, "Distortion (0 = pinhole), " + range_text(limits::kXi))->capture_default_str();
  if (with_yaw) {
    cmd.add_option("--yaw", f.yaw, "Yaw in degrees inside the panorama, " + range_text(limits::kYaw))
        ->capture_default_str();
  }
  cmd.add_option("--size", f.size, "Output size WxH in pixels, each >= 2")->capture_default_str();
}

std::array<int, 2> parse_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  int w = 0;
  int h = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument("no separator");
    std::size_t used_w = 0;
    std::size_t used_h = 0;
    w = std::stoi(text.substr(0, x), &used_w);
    h = std::stoi(text.substr(x + 1), &used_h);
    if (used_w != x || used_h != text.size() - x - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw UsageError(fmt::format("--size: expected WxH, got '{}'", text));
  }
  return {w, h};
}

CameraRig make_rig(const RigFlags& f) {
  RigParams p;
  p.roll_deg = f.roll;
  p.pitch_deg = f.pitch;
  p.vfov_deg = f.vfov;
  p.xi = f.xi;
  p.yaw_deg = f.yaw;
  const auto [w, h] = parse_size(f.size);
  p.width = w;
  p.height = h;
  try {
    return CameraRig(p);
  } catch (const ParameterError& e) {
    const std::string flag = (e.param() == "width" || e.param() == "height") ? "size" : e.param();
    throw UsageError(fmt::format("--{}: {}", flag, e.what()));
  }
}

void print_field_summary(const std::string& path, const PerspectiveField& pf) {
  fmt::print("{}: {}x{}, center latitude {:.4f} deg, {} degenerate pixels\n", path, pf.width(), pf.height(),
             pf.center_latitude(), pf.degenerate_count());
}

// Field JSON: {"width", "height", "up": [u0, v0, u1, v1, ...], "latitude": [...]}, row-major.
nlohmann::json field_to_json(const PerspectiveField& pf) {
  std::vector<double> up;
  up.reserve(pf.up_data().size() * 2);
  for (const auto& u : pf.up_data()) {
    up.push_back(u.x());
    up.push_back(u.y());
  }
  return {{"width", pf.width()}, {"height", pf.height()}, {"up", up}, {"latitude", pf.latitude_data()}};
}

PerspectiveField field_from_json(const nlohmann::json& j) {
  const int w = j.at("width").get<int>();
  const int h = j.at("height").get<int>();
  const auto up_flat = j.at("up").get<std::vector<double>>();
  auto lat = j.at("latitude").get<std::vector<double>>();
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (up_flat.size() != 2 * n) throw std::runtime_error("field JSON: 'up' must hold 2*width*height values");
  std::vector<Vec2> up(n);
  for (std::size_t i = 0; i < n; ++i) up[i] = {up_flat[2 * i], up_flat[2 * i + 1]};
  return PerspectiveField(w, h, std::move(up), std::move(lat));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot create '{}'", path));
  out << text;
}

std::vector<double> parse_levels(const std::string& text) {
  if (text.empty()) return default_contour_levels();
  std::vector<double> levels;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    try {
      std::size_t used = 0;
      const std::string item = text.substr(pos, comma - pos);
      levels.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--levels: expected comma-separated degrees, got '{}'", text));
    }
    pos = comma + 1;
  }
  return levels;
}

service::PreviewService* g_service = nullptr;

void handle_signal(int) {
  if (g_service) g_service->stop();
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("pfcam");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("PFCAM_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"pfcam: camera-view perspective fields, panorama crops and conditioning datasets"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.footer("Angles are in degrees. Set PFCAM_LOG_LEVEL=debug|info|warn|error|off for log verbosity.");
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads for per-pixel loops (0 = all cores)");

  // pfmap
  RigFlags pfmap_rig;
  std::string pfmap_out;
  auto* pfmap = app.add_subcommand("pfmap", "Write the encoded perspective-field map of a rig as PNG");
  add_rig_flags(*pfmap, pfmap_rig, false);
  pfmap->add_option("-o,--out", pfmap_out, "Output PNG path")->required();

  // crop
  RigFlags crop_rig;
  std::string crop_pano;
  std::string crop_out;
  std::string crop_pfmap;
  auto* crop = app.add_subcommand("crop", "Render a crop of an equirectangular panorama");
  crop->add_option("--pano", crop_pano, "Equirectangular panorama (PNG or JPEG)")->required();
  add_rig_flags(*crop, crop_rig, true);
  crop->add_option("-o,--out", crop_out, "Output crop PNG")->required();
  crop->add_option("--pfmap", crop_pfmap, "Also write the encoded perspective-field map here");

  // dataset
  std::string ds_panos;
  std::string ds_out;
  std::uint64_t ds_seed = 0;
  int ds_resolution = kDefaultResolution;
  std::string ds_prompts;
  auto* dataset = app.add_subcommand("dataset", "Generate crops, PF-US maps and manifest.jsonl from panoramas");
  dataset->add_option("--panos", ds_panos, "Directory of panoramas (png/jpg/jpeg)")->required();
  dataset->add_option("--out", ds_out, "Output directory")->required();
  dataset->add_option("--seed", ds_seed, "Global 64-bit seed")->capture_default_str();
  dataset->add_option("--resolution", ds_resolution, "Square crop size in pixels")->capture_default_str();
  dataset->add_option("--prompts", ds_prompts, "JSON object mapping sample id to prompt, attached after generation");

  // encode
  std::string enc_in;
  std::string enc_out;
  auto* enc = app.add_subcommand("encode", "Encode a field JSON (width, height, up, latitude) as a PF-US PNG");
  enc->add_option("-i,--in", enc_in, "Field JSON")->required();
  enc->add_option("-o,--out", enc_out, "Output PNG")->required();

  // decode
  std::string dec_in;
  std::string dec_out;
  auto* dec = app.add_subcommand("decode", "Decode a PF-US PNG; prints a summary and optionally writes field JSON");
  dec->add_option("-i,--in", dec_in, "PF-US PNG")->required();
  dec->add_option("-o,--out", dec_out, "Field JSON output ('-' for stdout)");

  // overlay
  RigFlags ov_rig;
  std::string ov_in;
  std::string ov_out;
  int ov_grid = service::kDefaultFieldGrid;
  std::string ov_levels;
  auto* ov = app.add_subcommand("overlay", "Arrow and latitude-contour geometry as JSON, from a rig or a PF-US PNG");
  add_rig_flags(*ov, ov_rig, false);
  ov->add_option("-i,--in", ov_in, "PF-US PNG to decode instead of computing from rig flags");
  ov->add_option("--grid", ov_grid, "Arrow spacing in pixels, >= 4")->capture_default_str();
  ov->add_option("--levels", ov_levels, "Comma-separated contour levels in degrees (default -75..75 step 15)");
  ov->add_option("-o,--out", ov_out, "Output JSON ('-' or omitted for stdout)");

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> serve_panos;
  std::string serve_dir;
  auto* serve = app.add_subcommand("serve", "Run the local HTTP preview service");
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--pano", serve_panos, "Panorama to register at startup (repeatable)");
  serve->add_option("--pano-dir", serve_dir, "Register every panorama in this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  set_thread_count(threads);

  try {
    if (*pfmap) {
      const CameraRig rig = make_rig(pfmap_rig);
      const PerspectiveField pf = compute_pf_map(rig);
      write_png(pfmap_out, encode(pf));
      print_field_summary(pfmap_out, pf);
    } else if (*crop) {
      const CameraRig rig = make_rig(crop_rig);
      const Panorama pano = Panorama::load(crop_pano);
      write_png(crop_out, render_crop(rig, pano));
      fmt::print("{}: {}x{} crop of '{}'\n", crop_out, rig.width(), rig.height(), crop_pano);
      if (!crop_pfmap.empty()) {
        const PerspectiveField pf = compute_pf_map(rig);
        write_png(crop_pfmap, encode(pf));
        print_field_summary(crop_pfmap, pf);
      }
    } else if (*dataset) {
      GenerateOptions opts{ds_panos, ds_out, ds_seed, ds_resolution};
      DatasetManifest m;
      try {
        m = generate(opts);
      } catch (const ParameterError& e) {
        throw UsageError(fmt::format("--resolution: {}", e.what()));
      }
      if (!ds_prompts.empty()) {
        std::ifstream in(ds_prompts);
        if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", ds_prompts));
        const auto prompts = nlohmann::json::parse(in).get<std::map<std::string, std::string>>();
        m = attach_prompts(std::move(m), prompts);
        write_manifest(m, ds_out);
      }
      fmt::print("{}: {} samples, {} failed panoramas\n", ds_out, m.records.size(), m.errors.size());
    } else if (*enc) {
      std::ifstream in(enc_in);
      if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", enc_in));
      const PerspectiveField pf = field_from_json(nlohmann::json::parse(in));
      write_png(enc_out, encode(pf));
      print_field_summary(enc_out, pf);
    } else if (*dec) {
      const PerspectiveField pf = decode(read_image(dec_in));
      if (!dec_out.empty()) write_text(dec_out, field_to_json(pf).dump() + "\n");
      if (dec_out != "-") print_field_summary(dec_in, pf);
    } else if (*ov) {
      const PerspectiveField pf = ov_in.empty() ? compute_pf_map(make_rig(ov_rig)) : decode(read_image(ov_in));
      const auto levels = parse_levels(ov_levels);
      FieldOverlay overlay;
      try {
        overlay = make_overlay(pf, ov_grid, levels);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      write_text(ov_out, service::field_json(pf, overlay).dump() + "\n");
    } else if (*serve) {
      service::PreviewService svc;
      std::vector<std::filesystem::path> paths(serve_panos.begin(), serve_panos.end());
      if (!serve_dir.empty()) {
        for (auto& p : list_panoramas(serve_dir)) paths.push_back(std::move(p));
      }
      for (const auto& p : paths) {
        const auto entry = svc.registry().add(Panorama::load(p), "", p.string());
        spdlog::info("registered panorama '{}' ({}x{})", entry.id, entry.width, entry.height);
      }
      g_service = &svc;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      spdlog::info("serving on http://{}:{}", host, port);
      if (!svc.listen(host, port)) throw std::runtime_error(fmt::format("cannot listen on {}:{}", host, port));
      g_service = nullptr;
    }
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
