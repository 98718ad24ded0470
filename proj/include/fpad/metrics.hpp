#pragma once

#include <string>
#include <vector>

#include "fpad/error.hpp"

namespace fpad {

struct OperatingPoint {
  double tdr = 0.0;
  double threshold = 0.0;
};

// Smallest threshold whose false-detection rate on live scores stays within
// fdr_target, and the spoof true-detection rate there. A candidate above the
// maximum score makes the constraint always satisfiable.
OperatingPoint tdr_at_fdr(const std::vector<double>& live_scores,
                          const std::vector<double>& spoof_scores,
                          double fdr_target = 0.001);

struct ClassScores {
  std::string name;
  bool is_live = false;
  std::vector<double> scores;
};

struct ClassRate {
  std::string name;
  bool is_live = false;
  double correct_rate = 0.0;
  std::size_t count = 0;
};

// Live samples are correct strictly below the threshold; spoof samples at or
// above it.
std::vector<ClassRate> per_class_rates(const std::vector<ClassScores>& classes,
                                       double threshold = 0.5);

}  // namespace fpad
