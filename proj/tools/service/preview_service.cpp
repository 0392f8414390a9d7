// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "preview_service.hpp"

#include "pfcam/perspective_field.hpp"
#include "pfcam/pf_codec.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <mutex>

namespace pfcam::service {

nlohmann::json to_json(const PanoRegistryEntry& e) {
  return {{"id", e.id},         {"name", e.name},     {"width", e.width},
          {"height", e.height}, {"source", e.source}, {"aspect_warning", e.aspect_warning}};
}

PanoRegistryEntry PanoRegistry::add(Panorama pano, std::string name, std::string source) {
  auto handle = std::make_shared<const Panorama>(std::move(pano));
  PanoRegistryEntry entry{handle->id(), name.empty() ? handle->id() : std::move(name), handle->width(),
                          handle->height(), std::move(source), handle->aspect_warning()};
  std::unique_lock lock(mu_);
  for (const auto& s : slots_) {
    if (s.entry.id == entry.id) throw DuplicatePanoramaError(entry.id);
  }
  slots_.push_back({entry, std::move(handle)});
  return entry;
}

std::vector<PanoRegistryEntry> PanoRegistry::list() const {
  std::shared_lock lock(mu_);
  std::vector<PanoRegistryEntry> out;
  out.reserve(slots_.size());
  for (const auto& s : slots_) out.push_back(s.entry);
  return out;
}

std::shared_ptr<const Panorama> PanoRegistry::find(const std::string& id) const {
  std::shared_lock lock(mu_);
  for (const auto& s : slots_) {
    if (s.entry.id == id) return s.pano;
  }
  return nullptr;
}

nlohmann::json error_envelope(const QueryError& e) {
  nlohmann::json j{{"error", e.message}};
  if (e.param) j["param"] = *e.param;
  if (e.range) j["range"] = {e.range->lo, e.range->hi};
  return j;
}

nlohmann::json field_json(const PerspectiveField& pf, const FieldOverlay& overlay) {
  nlohmann::json arrows = nlohmann::json::array();
  for (const auto& a : overlay.arrows) arrows.push_back({{"x", a.x}, {"y", a.y}, {"dx", a.dx}, {"dy", a.dy}});
  nlohmann::json contours = nlohmann::json::array();
  for (const auto& c : overlay.contours) {
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& line : c.lines) {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& p : line) pts.push_back({p.x, p.y});
      lines.push_back(std::move(pts));
    }
    contours.push_back({{"level", c.level}, {"lines", std::move(lines)}});
  }
  return {{"width", pf.width()},
          {"height", pf.height()},
          {"grid", overlay.grid},
          {"center_latitude", pf.center_latitude()},
          {"degenerate_pixels", pf.degenerate_count()},
          {"arrows", std::move(arrows)},
          {"contours", std::move(contours)}};
}

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kPng = "image/png";

double parse_number(const httplib::Request& req, const std::string& name, std::optional<double> fallback) {
  if (!req.has_param(name)) {
    if (fallback) return *fallback;
    throw QueryError{400, fmt::format("missing parameter '{}'", name), name, std::nullopt};
  }
  const std::string text = req.get_param_value(name);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
    throw QueryError{400, fmt::format("parameter '{}' is not a number: '{}'", name, text), name, std::nullopt};
  }
  return value;
}

int parse_size(const httplib::Request& req, const std::string& name) {
  const double v = parse_number(req, name, kDefaultPreviewSize);
  const ParamRange range{static_cast<double>(limits::kMinDimension), static_cast<double>(kMaxQuerySize), true, true};
  if (v != std::floor(v)) {
    throw QueryError{400, fmt::format("parameter '{}' must be an integer", name), name, range};
  }
  if (!range.contains(v)) {
    throw QueryError{400, fmt::format("{} = {:g} is outside the legal range {}", name, v, range.describe()), name,
                     range};
  }
  return static_cast<int>(v);
}

CameraRig parse_rig(const httplib::Request& req, bool with_yaw) {
  RigParams p;
  p.roll_deg = parse_number(req, "roll", std::nullopt);
  p.pitch_deg = parse_number(req, "pitch", std::nullopt);
  p.vfov_deg = parse_number(req, "vfov", std::nullopt);
  p.xi = parse_number(req, "xi", std::nullopt);
  p.yaw_deg = with_yaw ? parse_number(req, "yaw", 0.0) : 0.0;
  p.width = parse_size(req, "w");
  p.height = parse_size(req, "h");
  try {
    return CameraRig(p);
  } catch (const ParameterError& e) {
    throw QueryError{400, e.what(), e.param(), e.range()};
  }
}

std::vector<double> parse_levels(const httplib::Request& req) {
  if (!req.has_param("levels")) return default_contour_levels();
  std::vector<double> levels;
  const std::string text = req.get_param_value("levels");
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data() + pos, text.data() + comma, v);
    if (ec != std::errc() || end != text.data() + comma) {
      throw QueryError{400, fmt::format("parameter 'levels' is not a comma-separated number list: '{}'", text),
                       "levels", ParamRange{-90, 90, true, true}};
    }
    levels.push_back(v);
    pos = comma + 1;
  }
  return levels;
}

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_png(httplib::Response& res, const RgbImage& img) {
  const auto bytes = encode_png(img);
  res.status = 200;
  res.set_content(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()), kPng);
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const QueryError& e) {
      send_json(res, e.status, error_envelope(e));
    } catch (const std::exception& e) {
      spdlog::error("{} {}: {}", req.method, req.path, e.what());
      send_json(res, 500, {{"error", e.what()}});
    }
  };
}

std::string sanitize_id(std::string_view raw) {
  std::string id;
  for (const char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    id += (std::isalnum(u) || c == '-' || c == '_' || c == '.') ? c : '_';
  }
  return id;
}

}  // namespace

PreviewService::PreviewService(std::shared_ptr<PanoRegistry> registry)
    : registry_(std::move(registry)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

PreviewService::~PreviewService() = default;

void PreviewService::install_routes() {
  auto& svr = *server_;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  svr.Get("/api/panoramas", guarded([this](const httplib::Request&, httplib::Response& res) {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& e : registry_->list()) list.push_back(to_json(e));
            send_json(res, 200, list);
          }));

  svr.Post("/api/panoramas", guarded([this](const httplib::Request& req, httplib::Response& res) {
             if (!req.has_file("file")) {
               throw QueryError{400, "multipart field 'file' is required", "file", std::nullopt};
             }
             const auto file = req.get_file_value("file");
             std::string id = req.has_file("id") ? req.get_file_value("id").content : std::string{};
             if (id.empty()) id = std::filesystem::path(file.filename).stem().string();
             id = sanitize_id(id);
             if (id.empty()) throw QueryError{400, "panorama id is empty", "id", std::nullopt};
             const std::string name = req.has_file("name") ? req.get_file_value("name").content : id;

             RgbImage img;
             try {
               const auto* p = reinterpret_cast<const std::uint8_t*>(file.content.data());
               img = decode_image(std::span(p, file.content.size()));
             } catch (const ImageIoError& e) {
               throw QueryError{400, fmt::format("upload is not a readable image: {}", e.what()), "file",
                                std::nullopt};
             }
             try {
               const auto entry = registry_->add(Panorama(id, std::move(img)), name, "upload:" + file.filename);
               send_json(res, 201, to_json(entry));
             } catch (const DuplicatePanoramaError& e) {
               throw QueryError{409, e.what(), "id", std::nullopt};
             }
           }));

  svr.Get("/api/pfmap", guarded([](const httplib::Request& req, httplib::Response& res) {
            const CameraRig rig = parse_rig(req, false);
            send_png(res, encode(compute_pf_map(rig)));
          }));

  svr.Get("/api/render", guarded([this](const httplib::Request& req, httplib::Response& res) {
            if (!req.has_param("pano")) {
              throw QueryError{400, "missing parameter 'pano'", "pano", std::nullopt};
            }
            const CameraRig rig = parse_rig(req, true);
            const std::string id = req.get_param_value("pano");
            const auto pano = registry_->find(id);
            if (!pano) throw QueryError{404, fmt::format("unknown panorama '{}'", id), "pano", std::nullopt};
            send_png(res, render_crop(rig, *pano));
          }));

  svr.Get("/api/field", guarded([](const httplib::Request& req, httplib::Response& res) {
            const CameraRig rig = parse_rig(req, false);
            const double grid = parse_number(req, "grid", kDefaultFieldGrid);
            const ParamRange grid_range{static_cast<double>(kMinOverlayGrid),
                                        static_cast<double>(kMaxQuerySize), true, true};
            if (grid != std::floor(grid) || !grid_range.contains(grid)) {
              throw QueryError{400, fmt::format("grid = {:g} is outside the legal range {}", grid,
                                                grid_range.describe()),
                               "grid", grid_range};
            }
            const auto levels = parse_levels(req);
            const PerspectiveField pf = compute_pf_map(rig);
            try {
              send_json(res, 200, field_json(pf, make_overlay(pf, static_cast<int>(grid), levels)));
            } catch (const std::invalid_argument& e) {
              throw QueryError{400, e.what(), "levels", ParamRange{-90, 90, true, true}};
            }
          }));
}

bool PreviewService::listen(const std::string& host, int port) { return server_->listen(host, port); }

int PreviewService::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool PreviewService::listen_after_bind() { return server_->listen_after_bind(); }

void PreviewService::stop() { server_->stop(); }

void PreviewService::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace pfcam::service
