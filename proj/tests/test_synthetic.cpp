#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "fpad/dataset.hpp"
#include "fpad/image_io.hpp"
#include "fpad/raster.hpp"
#include "fpad/synthetic.hpp"
#include "helpers.hpp"

using fpad::Errc;
using fpad::Label;
using fpad::SampleRecord;
using fpad::Stream;
using fpad::SyntheticSpec;

namespace {

SyntheticSpec tiny_spec() {
  SyntheticSpec spec;
  spec.subjects = 2;
  spec.fingers_per_subject = 1;
  spec.impressions = 2;
  spec.materials = {"gel", "latex"};
  spec.instances_per_material = 2;
  spec.impressions_per_instance = 1;
  spec.width = 32;
  spec.height = 32;
  return spec;
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

double circular_gap_deg(double a, double b) {
  const double d = std::fabs(std::fmod(a - b, 360.0));
  return std::min(d, 360.0 - d);
}

double mean_hue_degrees(const fpad::RasterImage& rgb) {
  const fpad::RasterImage hsv = fpad::rgb_to_hsv(rgb);
  double sum = 0.0;
  for (int y = 0; y < hsv.height(); ++y)
    for (int x = 0; x < hsv.width(); ++x) sum += hsv.at(x, y, 0) * (360.0 / 255.0);
  return sum / (static_cast<double>(hsv.width()) * hsv.height());
}

}  // namespace

TEST_SUITE("synthetic") {

TEST_CASE("class hues sit on the documented anchors") {
  CHECK(fpad::live_hue_degrees() == doctest::Approx(22.0));

  SyntheticSpec spec;
  const std::vector<double> hues = fpad::material_hues_degrees(spec);
  REQUIRE(hues.size() == 4);
  CHECK(hues[0] == doctest::Approx(85.0));
  CHECK(hues[1] == doctest::Approx(165.0));
  CHECK(hues[2] == doctest::Approx(245.0));
  CHECK(hues[3] == doctest::Approx(325.0));

  spec.materials = {"solo"};
  const std::vector<double> single = fpad::material_hues_degrees(spec);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(205.0));

  spec.materials = {"a", "b", "c", "d", "e", "f", "g"};
  const std::vector<double> seven = fpad::material_hues_degrees(spec);
  REQUIRE(seven.size() == 7);
  CHECK(seven.front() == doctest::Approx(85.0));
  CHECK(seven.back() == doctest::Approx(325.0));
  for (std::size_t i = 1; i < seven.size(); ++i)
    CHECK(seven[i] - seven[i - 1] == doctest::Approx(240.0 / 6.0));
}

TEST_CASE("spec validation rejects unusable layouts") {
  CHECK_NOTHROW((SyntheticSpec{}).validate());

  SyntheticSpec spec = tiny_spec();
  spec.subjects = 0;
  CHECK(testutil::thrown_code([&] { spec.validate(); }) == Errc::InvalidArgument);

  spec = tiny_spec();
  spec.impressions_per_instance = 0;
  CHECK(testutil::thrown_code([&] { spec.validate(); }) == Errc::InvalidArgument);

  spec = tiny_spec();
  spec.width = 8;
  CHECK(testutil::thrown_code([&] { spec.validate(); }) == Errc::InvalidArgument);

  spec = tiny_spec();
  spec.materials.clear();
  CHECK(testutil::thrown_code([&] { spec.validate(); }) == Errc::InvalidArgument);

  spec = tiny_spec();
  spec.materials = {"gel,atin"};
  CHECK(testutil::thrown_code([&] { spec.validate(); }) == Errc::InvalidArgument);

  spec = tiny_spec();
  spec.materials = {""};
  CHECK(testutil::thrown_code([&] { spec.validate(); }) == Errc::InvalidArgument);

  spec = tiny_spec();
  spec.hue_separation = 121.0;
  CHECK(testutil::thrown_code([&] { spec.validate(); }) == Errc::InvalidArgument);
  spec.hue_separation = -1.0;
  CHECK(testutil::thrown_code([&] { spec.validate(); }) == Errc::InvalidArgument);
}

TEST_CASE("spec validation enforces the hue separation margin") {
  SyntheticSpec spec = tiny_spec();
  spec.materials = {"a", "b", "c", "d", "e", "f", "g", "h"};
  CHECK(testutil::thrown_code([&] { spec.validate(); }) == Errc::InvalidArgument);

  spec = tiny_spec();
  spec.hue_separation = 60.0;
  CHECK(testutil::thrown_code([&] { spec.validate(); }) == Errc::InvalidArgument);

  spec.hue_separation = 50.0;
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("generation emits one record per acquisition and stream") {
  const auto dir = testutil::fresh_dir("fpad_synth_layout");
  SyntheticSpec spec = tiny_spec();
  const std::vector<SampleRecord> records = fpad::generate_synthetic_corpus(spec, 11, dir);

  const std::size_t live_acqs = 2 * 1 * 2;
  const std::size_t spoof_acqs = 2 * 2 * 1;
  REQUIRE(records.size() == (live_acqs + spoof_acqs) * 2);

  CHECK(records[0].id == "live-s01-f01-i0-ftir");
  CHECK(records[1].id == "live-s01-f01-i0-direct");
  CHECK(records[0].image_path == "images/live-s01-f01-i0-ftir.png");

  std::set<std::string> ids;
  std::map<std::string, int> stream_counts;
  std::size_t live_records = 0;
  for (const auto& rec : records) {
    CHECK(ids.insert(rec.id).second);
    ++stream_counts[to_string(rec.stream)];
    if (rec.label == Label::Live) {
      ++live_records;
      CHECK(!rec.subject_id.empty());
      CHECK(rec.material.empty());
      CHECK(rec.spoof_instance_id.empty());
    } else {
      CHECK(rec.subject_id.empty());
      CHECK((rec.material == "gel" || rec.material == "latex"));
      CHECK(rec.spoof_instance_id == rec.material + "-0" + rec.finger_id.substr(2));
    }
    const auto path = dir / rec.image_path;
    REQUIRE(std::filesystem::exists(path));
    const fpad::RasterImage img = fpad::load_image(path);
    CHECK(img.width() == spec.width);
    CHECK(img.height() == spec.height);
    CHECK(img.channels() == (rec.stream == Stream::Cots ? 1 : 3));
  }
  CHECK(live_records == live_acqs * 2);
  CHECK(stream_counts["FTIR"] == static_cast<int>(live_acqs + spoof_acqs));
  CHECK(stream_counts["DIRECT"] == static_cast<int>(live_acqs + spoof_acqs));

  const std::vector<SampleRecord> reloaded = fpad::load_manifest(dir / "manifest.csv");
  REQUIRE(reloaded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(reloaded[i].id == records[i].id);
    CHECK(reloaded[i].image_path == records[i].image_path);
    CHECK(reloaded[i].stream == records[i].stream);
    CHECK(reloaded[i].label == records[i].label);
    CHECK(reloaded[i].material == records[i].material);
    CHECK(reloaded[i].subject_id == records[i].subject_id);
    CHECK(reloaded[i].spoof_instance_id == records[i].spoof_instance_id);
    CHECK(reloaded[i].finger_id == records[i].finger_id);
    CHECK(reloaded[i].impression_index == records[i].impression_index);
  }
}

TEST_CASE("the COTS stream is emitted only on request") {
  const auto dir = testutil::fresh_dir("fpad_synth_cots");
  SyntheticSpec spec = tiny_spec();
  spec.include_cots = true;
  const std::vector<SampleRecord> records = fpad::generate_synthetic_corpus(spec, 11, dir);
  REQUIRE(records.size() == 8 * 3);
  CHECK(records[2].id == "live-s01-f01-i0-cots");
  const fpad::RasterImage gray = fpad::load_image(dir / records[2].image_path);
  CHECK(gray.channels() == 1);
}

TEST_CASE("identical spec and seed reproduce every byte") {
  const auto dir_a = testutil::fresh_dir("fpad_synth_det_a");
  const auto dir_b = testutil::fresh_dir("fpad_synth_det_b");
  const SyntheticSpec spec = tiny_spec();
  const std::vector<SampleRecord> first = fpad::generate_synthetic_corpus(spec, 42, dir_a);
  const std::vector<SampleRecord> second = fpad::generate_synthetic_corpus(spec, 42, dir_b);
  REQUIRE(first.size() == second.size());

  CHECK(read_bytes(dir_a / "manifest.csv") == read_bytes(dir_b / "manifest.csv"));
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].id == second[i].id);
    CHECK(read_bytes(dir_a / first[i].image_path) ==
          read_bytes(dir_b / second[i].image_path));
  }
}

TEST_CASE("a different seed changes the rendered pixels") {
  const auto dir_a = testutil::fresh_dir("fpad_synth_seed_a");
  const auto dir_b = testutil::fresh_dir("fpad_synth_seed_b");
  const SyntheticSpec spec = tiny_spec();
  const std::vector<SampleRecord> first = fpad::generate_synthetic_corpus(spec, 1, dir_a);
  const std::vector<SampleRecord> second = fpad::generate_synthetic_corpus(spec, 2, dir_b);
  REQUIRE(first.size() == second.size());
  CHECK(read_bytes(dir_a / "manifest.csv") == read_bytes(dir_b / "manifest.csv"));

  bool any_pixel_differs = false;
  for (std::size_t i = 0; i < first.size() && !any_pixel_differs; ++i)
    any_pixel_differs =
        read_bytes(dir_a / first[i].image_path) != read_bytes(dir_b / second[i].image_path);
  CHECK(any_pixel_differs);
}

TEST_CASE("direct-stream hue identifies the class that rendered it") {
  const auto dir = testutil::fresh_dir("fpad_synth_hue");
  SyntheticSpec spec = tiny_spec();
  const std::vector<SampleRecord> records = fpad::generate_synthetic_corpus(spec, 5, dir);

  std::vector<std::pair<std::string, double>> class_hues;
  class_hues.emplace_back("", fpad::live_hue_degrees());
  const std::vector<double> hues = fpad::material_hues_degrees(spec);
  for (std::size_t i = 0; i < spec.materials.size(); ++i)
    class_hues.emplace_back(spec.materials[i], hues[i]);

  for (const auto& rec : records) {
    if (rec.stream != Stream::Direct) continue;
    const double observed = mean_hue_degrees(fpad::load_image(dir / rec.image_path));
    std::string nearest;
    double best = 1e9;
    for (const auto& [material, hue] : class_hues) {
      const double gap = circular_gap_deg(observed, hue);
      if (gap < best) {
        best = gap;
        nearest = material;
      }
    }
    CHECK(nearest == rec.material);
    CHECK(best < 12.0);
  }
}

}
