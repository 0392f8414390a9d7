// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pfcam/camera_model.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pfcam {

inline constexpr int kRegionsPerPanorama = 6;
inline constexpr int kCombosPerRegion = 4;
inline constexpr int kRigsPerPanorama = kRegionsPerPanorama * kCombosPerRegion;
inline constexpr double kRegionYawSpanDeg = 360.0 / kRegionsPerPanorama;
inline constexpr int kDefaultResolution = 1024;

namespace sampling {
inline constexpr ParamRange kRoll{-90.0, 90.0, false, false};
inline constexpr ParamRange kPitch{-90.0, 90.0, false, false};
inline constexpr ParamRange kVfovSmall{15.0, 60.0, true, false};
inline constexpr ParamRange kVfovLarge{60.0, 140.0, true, true};
inline constexpr ParamRange kXiLow{0.0, 0.5, false, false};
inline constexpr ParamRange kXiHigh{0.5, 1.0, true, false};
}  // namespace sampling

enum class VfovBucket { kSmall, kLarge };
enum class XiBucket { kLow, kHigh };

/// Seeded generator with portable output: std::mt19937_64 (whose sequence
/// is fixed by the C++ standard) plus explicit 53-bit float conversion.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

  /// [0, 1) with 53 random bits.
  double unit();
  /// Uniform over `range`, honoring open and closed ends by rejection.
  double uniform(const ParamRange& range);

 private:
  std::mt19937_64 engine_;
};

/// splitmix64(global_seed ^ fnv1a64(panorama_id)).
std::uint64_t stream_seed(std::uint64_t global_seed, std::string_view panorama_id);

struct PlannedRig {
  int region;
  VfovBucket vfov_bucket;
  XiBucket xi_bucket;
  RigParams params;

  /// e.g. "r3-small-high".
  [[nodiscard]] std::string tag() const;
};

struct SamplePlan {
  std::string panorama_id;
  std::uint64_t stream_seed;
  std::vector<PlannedRig> rigs;
};

/// 24 rigs: for each of six 60-degree yaw regions one yaw and one pitch,
/// one small and one large vfov, one low and one high xi, and an independent
/// roll per (vfov, xi) combination. Draw order per region: yaw, pitch,
/// vfov small, vfov large, xi low, xi high, then four rolls in combo order
/// (small/low, small/high, large/low, large/high).
SamplePlan plan_samples(std::string_view panorama_id, std::uint64_t seed, int resolution = kDefaultResolution);
std::vector<SamplePlan> plan_samples(std::span<const std::string> panorama_ids, std::uint64_t seed,
                                     int resolution = kDefaultResolution);

struct CropSample {
  std::string id;
  RigParams rig;
  std::string image_path;  // relative to the dataset root
  std::string pfmap_path;  // relative to the dataset root
  std::optional<std::string> prompt;
  std::string source_pano;
  std::uint64_t seed;
};

struct PanoramaFailure {
  std::string source_pano;
  std::string message;
};

struct DatasetManifest {
  std::string tool_version;
  std::uint64_t global_seed = 0;
  int resolution = kDefaultResolution;
  std::vector<CropSample> records;
  std::vector<PanoramaFailure> errors;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// attach_prompts() was given ids that are not in the manifest.
class UnknownIdError : public DatasetError {
 public:
  explicit UnknownIdError(std::vector<std::string> ids);
  [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

struct GenerateOptions {
  std::filesystem::path panorama_dir;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  int resolution = kDefaultResolution;
};

/// Renders every planned crop and its encoded perspective-field map into
/// out_dir/images and out_dir/pfmaps, then writes manifest.jsonl,
/// errors.jsonl and dataset.json. Outputs that already exist at the right
/// size are kept. Unreadable panoramas are recorded in errors.jsonl and
/// skipped. Throws DatasetError when the input directory holds no images.
DatasetManifest generate(const GenerateOptions& options);

/// Panorama files (png/jpg/jpeg) in a directory, sorted by file name.
std::vector<std::filesystem::path> list_panoramas(const std::filesystem::path& dir);

DatasetManifest attach_prompts(DatasetManifest manifest, const std::map<std::string, std::string>& prompts);

/// One JSON object per record, LF-terminated.
std::string manifest_jsonl(const DatasetManifest& manifest);
std::string errors_jsonl(const DatasetManifest& manifest);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& out_dir);
DatasetManifest read_manifest(const std::filesystem::path& out_dir);

}  // namespace pfcam
