// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfcam/dataset.hpp"

#include "oracles.hpp"
#include "pfcam/pf_codec.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pfcam {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Pearson statistic over equal-width bins of [lo, hi).
double chi_square(const std::vector<double>& xs, double lo, double hi, int bins) {
  std::vector<double> counts(bins, 0.0);
  for (const double x : xs) {
    const int b = std::min(bins - 1, static_cast<int>((x - lo) / (hi - lo) * bins));
    counts[b] += 1.0;
  }
  const double expected = static_cast<double>(xs.size()) / bins;
  double stat = 0.0;
  for (const double c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

// Upper 1% point of the chi-square distribution with 9 degrees of freedom.
constexpr double kChi2Df9P01 = 21.666;

TEST(SampleRngTest, UnitIsTopFiftyThreeBits) {
  std::mt19937_64 reference(77);
  SampleRng rng(77);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(rng.unit(), static_cast<double>(reference() >> 11) / 9007199254740992.0);
}

TEST(SampleRngTest, HonorsOpenEndpoints) {
  SampleRng rng(1);
  const ParamRange open_low{0.0, 0.5, false, false};
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(open_low);
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 0.5);
  }
  const ParamRange closed{60.0, 140.0, true, true};
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(closed);
    ASSERT_GE(x, 60.0);
    ASSERT_LE(x, 140.0);
  }
}

TEST(StreamSeedTest, DependsOnSeedAndId) {
  EXPECT_EQ(stream_seed(7, "pano"), stream_seed(7, "pano"));
  EXPECT_NE(stream_seed(7, "pano"), stream_seed(8, "pano"));
  EXPECT_NE(stream_seed(7, "pano"), stream_seed(7, "pano2"));
}

TEST(StreamSeedTest, MatchesReferenceHashes) {
  // FNV-1a 64 of the empty string is the offset basis; splitmix64 of 0 is a
  // published constant.
  EXPECT_EQ(stream_seed(0xcbf29ce484222325ULL, ""), 0xe220a8397b1dcdafULL);
}

TEST(PlanSamplesTest, SixRegionsFourCombos) {
  const auto plan = plan_samples("pano", 7);
  ASSERT_EQ(plan.rigs.size(), 24u);
  for (int r = 0; r < 6; ++r) {
    std::set<std::pair<int, int>> combos;
    const auto& first = plan.rigs[r * 4];
    for (int k = 0; k < 4; ++k) {
      const auto& pr = plan.rigs[r * 4 + k];
      EXPECT_EQ(pr.region, r);
      combos.insert({static_cast<int>(pr.vfov_bucket), static_cast<int>(pr.xi_bucket)});
      EXPECT_EQ(pr.params.yaw_deg, first.params.yaw_deg);
      EXPECT_EQ(pr.params.pitch_deg, first.params.pitch_deg);
      EXPECT_GE(pr.params.yaw_deg, 60.0 * r);
      EXPECT_LT(pr.params.yaw_deg, 60.0 * (r + 1));
      EXPECT_EQ(pr.params.width, kDefaultResolution);
    }
    EXPECT_EQ(combos.size(), 4u);
    // Both small-vfov rigs share a draw, as do both low-xi rigs.
    EXPECT_EQ(plan.rigs[r * 4].params.vfov_deg, plan.rigs[r * 4 + 1].params.vfov_deg);
    EXPECT_EQ(plan.rigs[r * 4].params.xi, plan.rigs[r * 4 + 2].params.xi);
    EXPECT_NE(plan.rigs[r * 4].params.roll_deg, plan.rigs[r * 4 + 1].params.roll_deg);
  }
  EXPECT_EQ(plan.rigs[5].tag(), "r1-small-high");
  EXPECT_EQ(plan.rigs[23].tag(), "r5-large-high");
}

TEST(PlanSamplesTest, Deterministic) {
  const std::vector<std::string> ids{"a", "b", "c"};
  const auto p1 = plan_samples(ids, 99);
  const auto p2 = plan_samples(ids, 99);
  ASSERT_EQ(p1.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(p1[i].stream_seed, p2[i].stream_seed);
    for (std::size_t k = 0; k < 24; ++k) {
      EXPECT_EQ(p1[i].rigs[k].params.roll_deg, p2[i].rigs[k].params.roll_deg);
      EXPECT_EQ(p1[i].rigs[k].params.vfov_deg, p2[i].rigs[k].params.vfov_deg);
    }
  }
  EXPECT_NE(plan_samples("a", 100).rigs[0].params.roll_deg, p1[0].rigs[0].params.roll_deg);
  // Each panorama's stream does not depend on its neighbours.
  EXPECT_EQ(plan_samples("b", 99).rigs[7].params.xi, p1[1].rigs[7].params.xi);
}

TEST(PlanSamplesTest, ParametersWithinRanges) {
  std::vector<std::string> ids;
  for (int i = 0; i < 200; ++i) ids.push_back("p" + std::to_string(i));
  for (const auto& plan : plan_samples(ids, 3)) {
    for (const auto& pr : plan.rigs) {
      const auto& p = pr.params;
      ASSERT_GT(p.roll_deg, -90.0);
      ASSERT_LT(p.roll_deg, 90.0);
      ASSERT_GT(p.pitch_deg, -90.0);
      ASSERT_LT(p.pitch_deg, 90.0);
      if (pr.vfov_bucket == VfovBucket::kSmall) {
        ASSERT_GE(p.vfov_deg, 15.0);
        ASSERT_LT(p.vfov_deg, 60.0);
      } else {
        ASSERT_GE(p.vfov_deg, 60.0);
        ASSERT_LE(p.vfov_deg, 140.0);
      }
      if (pr.xi_bucket == XiBucket::kLow) {
        ASSERT_GT(p.xi, 0.0);
        ASSERT_LT(p.xi, 0.5);
      } else {
        ASSERT_GE(p.xi, 0.5);
        ASSERT_LT(p.xi, 1.0);
      }
      ASSERT_NO_THROW(CameraRig{p});
    }
  }
}

TEST(PlanSamplesTest, HistogramsUniformWithinBuckets) {
  std::vector<std::string> ids;
  for (int i = 0; i < 1000; ++i) ids.push_back("pano-" + std::to_string(i));
  std::vector<double> roll, pitch, yaw_offset, vfov_small, vfov_large, xi_low, xi_high;
  for (const auto& plan : plan_samples(ids, 20260101)) {
    for (std::size_t k = 0; k < plan.rigs.size(); ++k) {
      const auto& pr = plan.rigs[k];
      roll.push_back(pr.params.roll_deg);
      if (k % 4 != 0) continue;
      pitch.push_back(pr.params.pitch_deg);
      yaw_offset.push_back(pr.params.yaw_deg - 60.0 * pr.region);
      vfov_small.push_back(plan.rigs[k].params.vfov_deg);
      vfov_large.push_back(plan.rigs[k + 2].params.vfov_deg);
      xi_low.push_back(plan.rigs[k].params.xi);
      xi_high.push_back(plan.rigs[k + 1].params.xi);
    }
  }
  EXPECT_EQ(roll.size(), 24000u);
  EXPECT_EQ(pitch.size(), 6000u);
  EXPECT_LT(chi_square(roll, -90, 90, 10), kChi2Df9P01);
  EXPECT_LT(chi_square(pitch, -90, 90, 10), kChi2Df9P01);
  EXPECT_LT(chi_square(yaw_offset, 0, 60, 10), kChi2Df9P01);
  EXPECT_LT(chi_square(vfov_small, 15, 60, 10), kChi2Df9P01);
  EXPECT_LT(chi_square(vfov_large, 60, 140, 10), kChi2Df9P01);
  EXPECT_LT(chi_square(xi_low, 0, 0.5, 10), kChi2Df9P01);
  EXPECT_LT(chi_square(xi_high, 0.5, 1, 10), kChi2Df9P01);
}

class GenerateTest : public ::testing::Test {
 protected:
  GenerateTest() : scratch_("generate") {
    fs::create_directories(panos());
    oracle::write_test_panorama(panos() / "alpha.png", 128, 64, 1);
    oracle::write_test_panorama(panos() / "beta.png", 128, 64, 2);
  }
  fs::path panos() const { return scratch_.path() / "panos"; }
  fs::path out(const std::string& name = "out") const { return scratch_.path() / name; }

  GenerateOptions options(const std::string& name = "out") const {
    GenerateOptions o;
    o.panorama_dir = panos();
    o.out_dir = out(name);
    o.seed = 7;
    o.resolution = 33;  // odd, so a single pixel sits on the optical axis
    return o;
  }

  oracle::ScratchDir scratch_;
};

TEST_F(GenerateTest, TwoPanoramasGive48RowsAnd96Files) {
  const auto m = generate(options());
  EXPECT_EQ(m.records.size(), 48u);
  EXPECT_TRUE(m.errors.empty());
  int files = 0;
  for (const auto& sub : {"images", "pfmaps"}) {
    for (const auto& e : fs::directory_iterator(out() / sub)) {
      EXPECT_EQ(e.path().extension(), ".png");
      ++files;
    }
  }
  EXPECT_EQ(files, 96);
  std::set<std::string> ids;
  for (const auto& s : m.records) {
    ids.insert(s.id);
    EXPECT_EQ(read_png_size(out() / s.image_path), (std::array<int, 2>{33, 33}));
    EXPECT_EQ(read_png_size(out() / s.pfmap_path), (std::array<int, 2>{33, 33}));
    EXPECT_FALSE(s.prompt.has_value());
    EXPECT_EQ(s.seed, 7u);
  }
  EXPECT_EQ(ids.size(), 48u);
  EXPECT_EQ(m.records.front().id, "alpha-r0-small-low");
  EXPECT_EQ(m.records.front().source_pano, "alpha.png");
  EXPECT_EQ(m.records.back().id, "beta-r5-large-high");
}

TEST_F(GenerateTest, ManifestRowsHaveFixedSchema) {
  generate(options());
  std::ifstream in(out() / "manifest.jsonl", std::ios::binary);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ASSERT_FALSE(line.empty());
    ASSERT_NE(line.back(), '\r');
    const auto j = nlohmann::ordered_json::parse(line);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"id", "image", "pfmap", "prompt", "omega", "source_pano", "seed"}));
    std::vector<std::string> omega;
    for (const auto& [k, v] : j["omega"].items()) omega.push_back(k);
    EXPECT_EQ(omega, (std::vector<std::string>{"roll", "pitch", "vfov", "xi", "yaw"}));
    EXPECT_TRUE(j["prompt"].is_null());
    ++rows;
  }
  EXPECT_EQ(rows, 48);
  EXPECT_TRUE(fs::exists(out() / "errors.jsonl"));
  EXPECT_EQ(fs::file_size(out() / "errors.jsonl"), 0u);
  const auto meta = nlohmann::json::parse(slurp(out() / "dataset.json"));
  EXPECT_EQ(meta["global_seed"], 7);
  EXPECT_EQ(meta["resolution"], 33);
}

TEST_F(GenerateTest, RerunIsByteIdentical) {
  generate(options("a"));
  generate(options("b"));
  for (const auto& e : fs::recursive_directory_iterator(out("a"))) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), out("a"));
    ASSERT_TRUE(fs::exists(out("b") / rel)) << rel;
    EXPECT_EQ(slurp(e.path()), slurp(out("b") / rel)) << rel;
  }
  auto other = options("c");
  other.seed = 8;
  const auto m = generate(other);
  EXPECT_EQ(m.records.size(), 48u);
  EXPECT_NE(slurp(out("a") / "manifest.jsonl"), slurp(out("c") / "manifest.jsonl"));
}

TEST_F(GenerateTest, EmittedMapsDecodeToTheirRigs) {
  const auto m = generate(options());
  for (const auto& s : m.records) {
    const auto dec = decode(read_image(out() / s.pfmap_path));
    const auto ref = compute_pf_map(CameraRig(s.rig));
    for (int y = 0; y < 33; ++y) {
      for (int x = 0; x < 33; ++x) {
        ASSERT_LE(std::abs(dec.latitude(x, y) - ref.latitude(x, y)), 180.0 / 255.0 * 0.5 + 1e-9);
        if (!ref.degenerate(x, y)) ASSERT_LE((dec.up(x, y) - ref.up(x, y)).cwiseAbs().maxCoeff(), 2.0 / 255.0);
      }
    }
    EXPECT_NEAR(dec.center_latitude(), s.rig.pitch_deg, 0.36);
    EXPECT_EQ(read_image(out() / s.image_path), render_crop(CameraRig(s.rig), Panorama::load(panos() / s.source_pano)));
  }
}

TEST_F(GenerateTest, ResumesWithoutRewritingValidOutputs) {
  const auto m = generate(options());
  const auto victim = out() / m.records[3].image_path;
  const auto keep = out() / m.records[4].image_path;
  const auto before = slurp(victim);
  const auto stamp = fs::last_write_time(keep);
  fs::remove(victim);
  write_file(out() / m.records[5].pfmap_path, std::vector<std::uint8_t>{0, 1, 2});
  generate(options());
  EXPECT_EQ(slurp(victim), before);
  EXPECT_EQ(fs::last_write_time(keep), stamp);
  EXPECT_EQ(read_png_size(out() / m.records[5].pfmap_path), (std::array<int, 2>{33, 33}));
}

TEST_F(GenerateTest, UnreadablePanoramaIsRecordedAndSkipped) {
  write_file(panos() / "broken.jpg", std::vector<std::uint8_t>{'n', 'o', 'p', 'e'});
  const auto m = generate(options());
  EXPECT_EQ(m.records.size(), 48u);
  ASSERT_EQ(m.errors.size(), 1u);
  EXPECT_EQ(m.errors[0].source_pano, "broken.jpg");
  const auto errors = slurp(out() / "errors.jsonl");
  EXPECT_NE(errors.find("broken.jpg"), std::string::npos);
}

TEST(GenerateErrorsTest, EmptyDirectory) {
  oracle::ScratchDir dir("generate-empty");
  fs::create_directories(dir.path() / "panos");
  GenerateOptions o{dir.path() / "panos", dir.path() / "out", 1, 16};
  try {
    generate(o);
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_STREQ(e.what(), "no input panoramas");
  }
  o.resolution = 1;
  EXPECT_THROW(generate(o), ParameterError);
}

TEST(ListPanoramasTest, FiltersAndSorts) {
  oracle::ScratchDir dir("list");
  for (const auto* name : {"b.JPG", "a.png", "c.jpeg", "notes.txt", "d.tif"}) write_file(dir.path() / name, std::vector<std::uint8_t>{0});
  fs::create_directories(dir.path() / "sub.png");
  const auto got = list_panoramas(dir.path());
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].filename(), "a.png");
  EXPECT_EQ(got[1].filename(), "b.JPG");
  EXPECT_EQ(got[2].filename(), "c.jpeg");
  EXPECT_THROW(list_panoramas(dir.path() / "missing"), DatasetError);
}

DatasetManifest small_manifest() {
  DatasetManifest m;
  m.tool_version = "test";
  m.global_seed = 5;
  for (const auto* id : {"x-r0-small-low", "x-r0-small-high", "x-r0-large-low"}) {
    CropSample s;
    s.id = id;
    s.rig = RigParams{};
    s.image_path = std::string("images/") + id + ".png";
    s.pfmap_path = std::string("pfmaps/") + id + ".png";
    s.source_pano = "x.png";
    s.seed = 5;
    m.records.push_back(s);
  }
  return m;
}

TEST(AttachPromptsTest, EmptyMappingLeavesManifestUnchanged) {
  const auto m = small_manifest();
  EXPECT_EQ(manifest_jsonl(attach_prompts(m, {})), manifest_jsonl(m));
}

TEST(AttachPromptsTest, FullMappingFillsEveryRow) {
  std::map<std::string, std::string> prompts;
  for (const auto& s : small_manifest().records) prompts[s.id] = "a photo of " + s.id;
  prompts["x-r0-small-high"] = "";
  const auto m = attach_prompts(small_manifest(), prompts);
  for (const auto& s : m.records) {
    ASSERT_TRUE(s.prompt.has_value());
    EXPECT_EQ(*s.prompt, prompts[s.id]);
  }
}

TEST(AttachPromptsTest, PartialMappingTouchesOnlyMappedRows) {
  const auto m = attach_prompts(small_manifest(), {{"x-r0-small-low", "street"}});
  EXPECT_EQ(m.records[0].prompt, std::optional<std::string>("street"));
  EXPECT_FALSE(m.records[1].prompt.has_value());
}

TEST(AttachPromptsTest, UnknownIdIsNamed) {
  try {
    attach_prompts(small_manifest(), {{"x-r0-small-low", "ok"}, {"alien", "?"}});
    FAIL();
  } catch (const UnknownIdError& e) {
    EXPECT_EQ(e.ids(), std::vector<std::string>{"alien"});
    EXPECT_NE(std::string(e.what()).find("alien"), std::string::npos);
  }
}

TEST(ManifestIoTest, WriteReadRoundTrip) {
  oracle::ScratchDir dir("manifest-io");
  auto m = attach_prompts(small_manifest(), {{"x-r0-small-high", "unicode \xc3\xa9t\xc3\xa9"}});
  m.records[2].rig.roll_deg = 0.1 + 0.2;
  m.errors.push_back({"y.png", "bad"});
  write_manifest(m, dir.path());
  const auto back = read_manifest(dir.path());
  EXPECT_EQ(back.tool_version, "test");
  EXPECT_EQ(back.global_seed, 5u);
  ASSERT_EQ(back.records.size(), 3u);
  EXPECT_EQ(back.records[2].rig.roll_deg, 0.1 + 0.2);
  EXPECT_EQ(back.records[1].prompt, m.records[1].prompt);
  EXPECT_EQ(manifest_jsonl(back), manifest_jsonl(m));
  ASSERT_EQ(back.errors.size(), 1u);
  EXPECT_EQ(back.errors[0].message, "bad");
}

}  // namespace
}  // namespace pfcam
