#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "fpad/error.hpp"

namespace fpad {

enum class Descriptor { Gray54, Clbp486, Fusion972 };
enum class Stream { Cots, Ftir, Direct, Fused };

int descriptor_dim(Descriptor d);
const char* to_string(Descriptor d);
const char* to_string(Stream s);
Descriptor parse_descriptor(const std::string& s);
Stream parse_stream(const std::string& s);

// Concatenated, per-block L1-normalized LBP histograms plus the identity of
// the extractor that produced them.
struct FeatureVector {
  Eigen::VectorXd values;
  Descriptor descriptor;
  Stream stream;
};

struct FeatureRecord {
  std::string id;
  FeatureVector feature;
};

// One record per line: descriptor tag, stream tag, sample id, values in
// fixed decimal.
void save_features_text(const std::vector<FeatureRecord>& records,
                        const std::filesystem::path& path);
std::vector<FeatureRecord> load_features_text(const std::filesystem::path& path);

// Compact container for bulk training sets: versioned header, then records
// with little-endian 64-bit floats.
void save_features_binary(const std::vector<FeatureRecord>& records,
                          const std::filesystem::path& path);
std::vector<FeatureRecord> load_features_binary(const std::filesystem::path& path);

// Loads either format, sniffing the binary magic.
std::vector<FeatureRecord> load_features(const std::filesystem::path& path);

}  // namespace fpad
