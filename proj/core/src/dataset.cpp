// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfcam/dataset.hpp"

#include "pfcam/panorama.hpp"
#include "pfcam/parallel.hpp"
#include "pfcam/perspective_field.hpp"
#include "pfcam/pf_codec.hpp"
#include "pfcam/version.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace pfcam {

using ordered_json = nlohmann::ordered_json;

double SampleRng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SampleRng::uniform(const ParamRange& range) {
  for (;;) {
    double x = 0.0;
    if (range.hi_closed) {
      // 53-bit lattice including both endpoints.
      const double k = static_cast<double>(engine_() >> 11);
      x = range.lo + (range.hi - range.lo) * (k / 0x1.fffffffffffffp52);
    } else {
      x = range.lo + (range.hi - range.lo) * unit();
    }
    if (range.contains(x)) return x;
  }
}

std::uint64_t stream_seed(std::uint64_t global_seed, std::string_view panorama_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : panorama_id) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = global_seed ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string PlannedRig::tag() const {
  return fmt::format("r{}-{}-{}", region, vfov_bucket == VfovBucket::kSmall ? "small" : "large",
                     xi_bucket == XiBucket::kLow ? "low" : "high");
}

SamplePlan plan_samples(std::string_view panorama_id, std::uint64_t seed, int resolution) {
  SamplePlan plan{std::string(panorama_id), stream_seed(seed, panorama_id), {}};
  plan.rigs.reserve(kRigsPerPanorama);
  SampleRng rng(plan.stream_seed);
  for (int r = 0; r < kRegionsPerPanorama; ++r) {
    const ParamRange yaw_range{kRegionYawSpanDeg * r, kRegionYawSpanDeg * (r + 1), true, false};
    const double yaw = rng.uniform(yaw_range);
    const double pitch = rng.uniform(sampling::kPitch);
    const double vfov[2] = {rng.uniform(sampling::kVfovSmall), rng.uniform(sampling::kVfovLarge)};
    const double xi[2] = {rng.uniform(sampling::kXiLow), rng.uniform(sampling::kXiHigh)};
    for (int combo = 0; combo < kCombosPerRegion; ++combo) {
      const int vi = combo / 2;
      const int xj = combo % 2;
      RigParams p;
      p.roll_deg = rng.uniform(sampling::kRoll);
      p.pitch_deg = pitch;
      p.vfov_deg = vfov[vi];
      p.xi = xi[xj];
      p.yaw_deg = yaw;
      p.width = resolution;
      p.height = resolution;
      plan.rigs.push_back({r, vi == 0 ? VfovBucket::kSmall : VfovBucket::kLarge,
                           xj == 0 ? XiBucket::kLow : XiBucket::kHigh, p});
    }
  }
  return plan;
}

std::vector<SamplePlan> plan_samples(std::span<const std::string> panorama_ids, std::uint64_t seed, int resolution) {
  std::vector<SamplePlan> plans;
  plans.reserve(panorama_ids.size());
  for (const auto& id : panorama_ids) plans.push_back(plan_samples(id, seed, resolution));
  return plans;
}

UnknownIdError::UnknownIdError(std::vector<std::string> ids)
    : DatasetError(fmt::format("prompt mapping references unknown ids: {}", fmt::join(ids, ", "))),
      ids_(std::move(ids)) {}

std::vector<std::filesystem::path> list_panoramas(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw DatasetError(fmt::format("panorama directory '{}' does not exist", dir.string()));
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  return out;
}

namespace {

bool has_png_of_size(const std::filesystem::path& path, int size) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return false;
  try {
    const auto dims = read_png_size(path);
    return dims[0] == size && dims[1] == size;
  } catch (const ImageIoError&) {
    return false;
  }
}

void write_png_atomically(const std::filesystem::path& path, const RgbImage& img) {
  auto tmp = path;
  tmp += ".tmp";
  write_png(tmp, img);
  std::filesystem::rename(tmp, path);
}

struct PanoramaResult {
  std::vector<CropSample> records;
  std::optional<PanoramaFailure> failure;
};

PanoramaResult process_panorama(const std::filesystem::path& path, const SamplePlan& plan,
                                const GenerateOptions& options) {
  PanoramaResult result;
  std::vector<CropSample> records;
  for (const auto& planned : plan.rigs) {
    CropSample s;
    s.id = plan.panorama_id + "-" + planned.tag();
    s.rig = planned.params;
    s.image_path = "images/" + s.id + ".png";
    s.pfmap_path = "pfmaps/" + s.id + ".png";
    s.source_pano = path.filename().string();
    s.seed = options.seed;
    records.push_back(std::move(s));
  }

  std::optional<Panorama> pano;
  try {
    for (const auto& s : records) {
      const bool have_image = has_png_of_size(options.out_dir / s.image_path, options.resolution);
      const bool have_map = has_png_of_size(options.out_dir / s.pfmap_path, options.resolution);
      if (have_image && have_map) continue;
      const CameraRig rig(s.rig);
      if (!have_image) {
        if (!pano) pano.emplace(Panorama::load(path, plan.panorama_id));
        write_png_atomically(options.out_dir / s.image_path, render_crop(rig, *pano));
      }
      if (!have_map) write_png_atomically(options.out_dir / s.pfmap_path, encode(compute_pf_map(rig)));
    }
  } catch (const std::exception& e) {
    spdlog::error("skipping panorama '{}': {}", path.filename().string(), e.what());
    result.failure = PanoramaFailure{path.filename().string(), e.what()};
    return result;
  }
  spdlog::info("panorama '{}': {} samples", path.filename().string(), records.size());
  result.records = std::move(records);
  return result;
}

ordered_json record_json(const CropSample& s) {
  ordered_json j;
  j["id"] = s.id;
  j["image"] = s.image_path;
  j["pfmap"] = s.pfmap_path;
  j["prompt"] = s.prompt ? ordered_json(*s.prompt) : ordered_json(nullptr);
  j["omega"] = {{"roll", s.rig.roll_deg},
                {"pitch", s.rig.pitch_deg},
                {"vfov", s.rig.vfov_deg},
                {"xi", s.rig.xi},
                {"yaw", s.rig.yaw_deg}};
  j["source_pano"] = s.source_pano;
  j["seed"] = s.seed;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError(fmt::format("cannot create '{}'", path.string()));
  out << text;
  if (!out) throw DatasetError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace

DatasetManifest generate(const GenerateOptions& options) {
  if (options.resolution < limits::kMinDimension) {
    throw ParameterError("resolution", fmt::format("must be at least {} px", limits::kMinDimension));
  }
  const auto paths = list_panoramas(options.panorama_dir);
  if (paths.empty()) throw DatasetError("no input panoramas");

  std::filesystem::create_directories(options.out_dir / "images");
  std::filesystem::create_directories(options.out_dir / "pfmaps");

  std::vector<std::string> ids;
  ids.reserve(paths.size());
  for (const auto& p : paths) ids.push_back(p.stem().string());
  const auto plans = plan_samples(ids, options.seed, options.resolution);

  std::vector<PanoramaResult> results(paths.size());
  std::set<std::string> seen;
  std::vector<bool> duplicate(paths.size(), false);
  for (std::size_t i = 0; i < ids.size(); ++i) duplicate[i] = !seen.insert(ids[i]).second;

  parallel_rows(static_cast<int>(paths.size()), [&](int i) {
    if (duplicate[i]) {
      results[i].failure =
          PanoramaFailure{paths[i].filename().string(), fmt::format("duplicate panorama id '{}'", ids[i])};
      return;
    }
    results[i] = process_panorama(paths[i], plans[i], options);
  });

  DatasetManifest manifest;
  manifest.tool_version = kVersion;
  manifest.global_seed = options.seed;
  manifest.resolution = options.resolution;
  for (auto& r : results) {
    if (r.failure) manifest.errors.push_back(std::move(*r.failure));
    for (auto& s : r.records) manifest.records.push_back(std::move(s));
  }
  write_manifest(manifest, options.out_dir);
  return manifest;
}

DatasetManifest attach_prompts(DatasetManifest manifest, const std::map<std::string, std::string>& prompts) {
  std::map<std::string, CropSample*> by_id;
  for (auto& s : manifest.records) by_id[s.id] = &s;
  std::vector<std::string> unknown;
  for (const auto& [id, prompt] : prompts) {
    if (!by_id.contains(id)) unknown.push_back(id);
  }
  if (!unknown.empty()) throw UnknownIdError(std::move(unknown));
  for (const auto& [id, prompt] : prompts) by_id[id]->prompt = prompt;
  return manifest;
}

std::string manifest_jsonl(const DatasetManifest& manifest) {
  std::string out;
  for (const auto& s : manifest.records) {
    out += record_json(s).dump();
    out += '\n';
  }
  return out;
}

std::string errors_jsonl(const DatasetManifest& manifest) {
  std::string out;
  for (const auto& e : manifest.errors) {
    ordered_json j;
    j["source_pano"] = e.source_pano;
    j["error"] = e.message;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& out_dir) {
  write_text(out_dir / "manifest.jsonl", manifest_jsonl(manifest));
  write_text(out_dir / "errors.jsonl", errors_jsonl(manifest));
  ordered_json meta;
  meta["tool_version"] = manifest.tool_version;
  meta["global_seed"] = manifest.global_seed;
  meta["resolution"] = manifest.resolution;
  meta["prng"] = "mt19937_64 seeded with splitmix64(global_seed ^ fnv1a64(panorama_id))";
  meta["records"] = manifest.records.size();
  meta["failed_panoramas"] = manifest.errors.size();
  write_text(out_dir / "dataset.json", meta.dump(2) + "\n");
}

DatasetManifest read_manifest(const std::filesystem::path& out_dir) {
  DatasetManifest m;
  std::ifstream meta_in(out_dir / "dataset.json");
  if (!meta_in) throw DatasetError(fmt::format("no dataset.json in '{}'", out_dir.string()));
  try {
    const auto meta = nlohmann::json::parse(meta_in);
    m.tool_version = meta.at("tool_version").get<std::string>();
    m.global_seed = meta.at("global_seed").get<std::uint64_t>();
    m.resolution = meta.at("resolution").get<int>();

    std::ifstream in(out_dir / "manifest.jsonl");
    if (!in) throw DatasetError(fmt::format("no manifest.jsonl in '{}'", out_dir.string()));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      CropSample s;
      s.id = j.at("id").get<std::string>();
      s.image_path = j.at("image").get<std::string>();
      s.pfmap_path = j.at("pfmap").get<std::string>();
      if (!j.at("prompt").is_null()) s.prompt = j.at("prompt").get<std::string>();
      const auto& o = j.at("omega");
      s.rig.roll_deg = o.at("roll").get<double>();
      s.rig.pitch_deg = o.at("pitch").get<double>();
      s.rig.vfov_deg = o.at("vfov").get<double>();
      s.rig.xi = o.at("xi").get<double>();
      s.rig.yaw_deg = o.at("yaw").get<double>();
      s.rig.width = m.resolution;
      s.rig.height = m.resolution;
      s.source_pano = j.at("source_pano").get<std::string>();
      s.seed = j.at("seed").get<std::uint64_t>();
      m.records.push_back(std::move(s));
    }

    std::ifstream err_in(out_dir / "errors.jsonl");
    while (err_in && std::getline(err_in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      m.errors.push_back({j.at("source_pano").get<std::string>(), j.at("error").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(fmt::format("malformed manifest in '{}': {}", out_dir.string(), e.what()));
  }
  return m;
}

}  // namespace pfcam
