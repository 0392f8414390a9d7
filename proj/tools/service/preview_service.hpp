// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pfcam/camera_model.hpp"
#include "pfcam/overlay.hpp"
#include "pfcam/panorama.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace pfcam::service {

inline constexpr int kMaxQuerySize = 2048;
inline constexpr int kDefaultPreviewSize = 512;
inline constexpr int kDefaultFieldGrid = 32;

struct PanoRegistryEntry {
  std::string id;
  std::string name;
  int width;
  int height;
  std::string source;
  bool aspect_warning;
};

nlohmann::json to_json(const PanoRegistryEntry& e);

class DuplicatePanoramaError : public std::runtime_error {
 public:
  explicit DuplicatePanoramaError(const std::string& id) : std::runtime_error("panorama id '" + id + "' already registered") {}
};

/// Append-only set of panoramas. Readers take a shared lock only long enough
/// to copy a handle; rendering never holds the lock.
class PanoRegistry {
 public:
  PanoRegistryEntry add(Panorama pano, std::string name, std::string source);
  [[nodiscard]] std::vector<PanoRegistryEntry> list() const;
  [[nodiscard]] std::shared_ptr<const Panorama> find(const std::string& id) const;

 private:
  struct Slot {
    PanoRegistryEntry entry;
    std::shared_ptr<const Panorama> pano;
  };
  mutable std::shared_mutex mu_;
  std::vector<Slot> slots_;
};

/// Bad query parameter; rendered as the JSON error envelope
/// {"error": ..., "param": ..., "range": [lo, hi]}.
struct QueryError {
  int status;
  std::string message;
  std::optional<std::string> param;
  std::optional<ParamRange> range;
};

nlohmann::json error_envelope(const QueryError& e);

/// Arrows, contours and center latitude as served by /api/field and
/// written by `pfcam overlay`.
nlohmann::json field_json(const PerspectiveField& pf, const FieldOverlay& overlay);

class PreviewService {
 public:
  explicit PreviewService(std::shared_ptr<PanoRegistry> registry = std::make_shared<PanoRegistry>());
  ~PreviewService();
  PreviewService(const PreviewService&) = delete;
  PreviewService& operator=(const PreviewService&) = delete;

  [[nodiscard]] PanoRegistry& registry() { return *registry_; }

  /// Blocks serving on host:port. Returns false if binding fails.
  bool listen(const std::string& host, int port);
  /// Binds to a free port and returns it (or -1); follow with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  void install_routes();

  std::shared_ptr<PanoRegistry> registry_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace pfcam::service
