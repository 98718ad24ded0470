#include "fpad/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace fpad {
namespace {

void check_scores(const std::vector<double>& scores, const char* what) {
  if (scores.empty()) raise(Errc::EmptyInput, std::string(what) + " score list is empty");
  for (double s : scores)
    if (!(s >= 0.0 && s <= 1.0))
      raise(Errc::InvalidData, std::string(what) + " score outside [0, 1]");
}

std::size_t count_at_least(const std::vector<double>& ascending, double t) {
  return ascending.end() - std::lower_bound(ascending.begin(), ascending.end(), t);
}

}  // namespace

OperatingPoint tdr_at_fdr(const std::vector<double>& live_scores,
                          const std::vector<double>& spoof_scores, double fdr_target) {
  check_scores(live_scores, "live");
  check_scores(spoof_scores, "spoof");
  if (!(fdr_target >= 0.0 && fdr_target <= 1.0))
    raise(Errc::InvalidArgument, "fdr_target outside [0, 1]");

  std::vector<double> live = live_scores, spoof = spoof_scores;
  std::sort(live.begin(), live.end());
  std::sort(spoof.begin(), spoof.end());

  std::vector<double> candidates;
  candidates.reserve(live.size() + spoof.size() + 1);
  candidates.insert(candidates.end(), live.begin(), live.end());
  candidates.insert(candidates.end(), spoof.begin(), spoof.end());
  candidates.push_back(1.0 + 1e-9);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (double t : candidates) {
    const double fdr = static_cast<double>(count_at_least(live, t)) / live.size();
    if (fdr <= fdr_target) {
      const double tdr = static_cast<double>(count_at_least(spoof, t)) / spoof.size();
      return {tdr, t};
    }
  }
  raise(Errc::InvalidData, "no threshold satisfies the FDR target");
}

std::vector<ClassRate> per_class_rates(const std::vector<ClassScores>& classes,
                                       double threshold) {
  if (classes.empty()) raise(Errc::EmptyInput, "no classes to rate");
  std::vector<ClassRate> rates;
  rates.reserve(classes.size());
  for (const auto& cls : classes) {
    check_scores(cls.scores, cls.name.c_str());
    std::size_t correct = 0;
    for (double s : cls.scores)
      correct += cls.is_live ? (s < threshold) : (s >= threshold);
    rates.push_back(
        {cls.name, cls.is_live, static_cast<double>(correct) / cls.scores.size(),
         cls.scores.size()});
  }
  return rates;
}

}  // namespace fpad
