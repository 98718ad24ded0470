#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fpad/dataset.hpp"

namespace fpad {

// Layout of a generated corpus: live acquisitions are subjects x fingers x
// impressions; spoof acquisitions are instances x impressions per material.
// Every acquisition is rendered once per stream (FTIR and DIRECT, plus COTS
// when requested).
struct SyntheticSpec {
  int subjects = 10;
  int fingers_per_subject = 4;
  int impressions = 5;
  std::vector<std::string> materials = {"ecoflex", "gelatin", "woodglue", "playdoh"};
  int instances_per_material = 5;
  int impressions_per_instance = 10;
  int width = 96;
  int height = 96;
  bool include_cots = false;
  // Minimum circular distance in degrees between any two class hues.
  double hue_separation = 45.0;

  void validate() const;
};

double live_hue_degrees();
std::vector<double> material_hues_degrees(const SyntheticSpec& spec);

// Writes images under out_dir/images and the manifest at out_dir/manifest.csv,
// then returns the records. Identical spec and seed reproduce every byte.
std::vector<SampleRecord> generate_synthetic_corpus(const SyntheticSpec& spec,
                                                    std::uint64_t seed,
                                                    const std::filesystem::path& out_dir);

}  // namespace fpad
