#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fpad/features.hpp"

namespace fpad {

enum class Label { Live, Spoof };

const char* to_string(Label l);
Label parse_label(const std::string& s);

struct SampleRecord {
  std::string id;
  std::string image_path;
  Stream stream = Stream::Cots;
  Label label = Label::Live;
  std::string material;           // spoof only
  std::string subject_id;         // live only (spoofs may leave it empty)
  std::string spoof_instance_id;  // spoof only
  std::string finger_id;
  int impression_index = 0;
};

// Groups the paired per-stream records of one physical capture.
std::string acquisition_key(const SampleRecord& rec);

std::vector<SampleRecord> load_manifest(const std::filesystem::path& path);
void save_manifest(const std::vector<SampleRecord>& records,
                   const std::filesystem::path& path);

struct FoldSplit {
  int fold_index = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

struct FoldPlan {
  std::vector<FoldSplit> folds;
  // Materials with fewer acquisitions than folds stay on the train side of
  // every fold.
  std::vector<std::string> train_only_materials;
};

// Live subjects are partitioned into k near-equal groups, each the test side
// exactly once; spoof acquisitions are shuffled per material and rotated so
// each fold tests a disjoint fifth (at k=5) of every material.
FoldPlan make_folds(const std::vector<SampleRecord>& records, int k, std::uint64_t seed);

}  // namespace fpad
