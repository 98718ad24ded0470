#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fpad/dataset.hpp"
#include "fpad/metrics.hpp"
#include "fpad/svm.hpp"

namespace fpad {

enum class Experiment { CotsLbp, FtirClbp, DirectClbp, FusionClbp };

const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& s);
Descriptor experiment_descriptor(Experiment e);

struct ExperimentConfig {
  int k = 5;
  std::uint64_t seed = 0;
  double fdr_target = 0.001;
  // When set, C is cross-validated on each fold's training side from
  // train.c_grid; otherwise train.C is used as-is.
  bool select_c = false;
  TrainConfig train;
};

struct FoldMetrics {
  int fold_index = 0;
  double tdr = 0.0;
  double threshold = 0.0;
  double c_used = 0.0;
  std::size_t train_units = 0;
  std::size_t test_units = 0;
  std::vector<ClassRate> class_rates;
};

struct ClassRateSummary {
  std::string name;
  bool is_live = false;
  double mean = 0.0;
  double stdev = 0.0;
};

struct EvalReport {
  Experiment experiment = Experiment::FusionClbp;
  int k = 5;
  std::uint64_t seed = 0;
  double fdr_target = 0.001;
  std::vector<FoldMetrics> folds;
  double tdr_mean = 0.0;
  double tdr_stdev = 0.0;
  std::vector<ClassRateSummary> class_summary;
  // Median per-image feature extraction plus scoring time; image decoding
  // and the calibration warp are not counted.
  double median_detect_ms = 0.0;
  std::vector<std::string> train_only_materials;
};

// Scores each fold's test side with a model trained and calibrated on its
// train side. A unit is one acquisition: a single record for the
// single-stream experiments, the FTIR/DIRECT pair for fusion. Image paths
// resolve against image_root unless absolute.
EvalReport run_experiment(const std::vector<SampleRecord>& records,
                          const std::filesystem::path& image_root, Experiment experiment,
                          const ExperimentConfig& cfg);

void save_report_json(const EvalReport& report, const std::filesystem::path& path);
std::string report_table(const EvalReport& report);
void save_report_table(const EvalReport& report, const std::filesystem::path& path);

}  // namespace fpad
