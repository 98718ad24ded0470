#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "fpad/metrics.hpp"
#include "helpers.hpp"

namespace {

using fpad::ClassScores;
using fpad::OperatingPoint;

// Exhaustive reference: walk every candidate threshold (each observed score
// plus one value above the maximum) in ascending order and return the first
// that keeps the live false-detection rate within the target.
OperatingPoint sweep_oracle(const std::vector<double>& live, const std::vector<double>& spoof,
                            double fdr_target) {
  std::vector<double> candidates = live;
  candidates.insert(candidates.end(), spoof.begin(), spoof.end());
  candidates.push_back(1.0 + 1e-9);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (double t : candidates) {
    std::size_t fd = 0;
    for (double s : live) fd += s >= t;
    if (static_cast<double>(fd) / live.size() <= fdr_target) {
      std::size_t td = 0;
      for (double s : spoof) td += s >= t;
      return {static_cast<double>(td) / spoof.size(), t};
    }
  }
  return {0.0, 2.0};
}

std::vector<double> random_scores(std::mt19937_64& rng, std::size_t n, int quantized) {
  std::vector<double> s(n);
  for (auto& v : s) {
    const double u = (rng() >> 11) * 0x1.0p-53;
    v = quantized > 0 ? std::round(u * quantized) / quantized : u;
  }
  return s;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("operating point: pinned tiny example") {
    // live {0.1 0.2 0.9}, spoof {0.3 0.8 0.95}: at target 0 the threshold must
    // clear the worst live score, leaving only the spoof 0.95 detected
    const std::vector<double> live{0.1, 0.2, 0.9};
    const std::vector<double> spoof{0.3, 0.8, 0.95};
    const OperatingPoint op = fpad::tdr_at_fdr(live, spoof, 0.0);
    CHECK(op.threshold == 0.95);
    CHECK(op.tdr == doctest::Approx(1.0 / 3.0));
    // with one live false detection allowed the threshold drops to 0.3
    const OperatingPoint relaxed = fpad::tdr_at_fdr(live, spoof, 1.0 / 3.0);
    CHECK(relaxed.threshold == 0.3);
    CHECK(relaxed.tdr == 1.0);
  }

  TEST_CASE("operating point: separable scores detect everything at target zero") {
    const std::vector<double> live{0.0, 0.1, 0.2};
    const std::vector<double> spoof{0.7, 0.8, 1.0};
    const OperatingPoint op = fpad::tdr_at_fdr(live, spoof, 0.0);
    CHECK(op.tdr == 1.0);
    CHECK(op.threshold == 0.7);
  }

  TEST_CASE("operating point: all-identical scores fall back to the sentinel") {
    // every observed threshold keeps FDR at 1, so only the above-maximum
    // candidate satisfies a zero target and nothing is detected
    const std::vector<double> same(5, 0.5);
    const OperatingPoint op = fpad::tdr_at_fdr(same, same, 0.0);
    CHECK(op.tdr == 0.0);
    CHECK(op.threshold == 1.0 + 1e-9);
  }

  TEST_CASE("operating point: equals the exhaustive sweep on random score sets") {
    std::mt19937_64 rng(2718u);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n_live = 1 + rng() % 30;
      const std::size_t n_spoof = 1 + rng() % 30;
      // quantized scores force plenty of exact ties across the two lists
      const int q = trial % 3 == 0 ? 8 : 0;
      const std::vector<double> live = random_scores(rng, n_live, q);
      const std::vector<double> spoof = random_scores(rng, n_spoof, q);
      const double target = (trial % 5) * 0.25;
      const OperatingPoint got = fpad::tdr_at_fdr(live, spoof, target);
      const OperatingPoint want = sweep_oracle(live, spoof, target);
      CHECK(got.tdr == want.tdr);
      CHECK(got.threshold == want.threshold);
    }
  }

  TEST_CASE("operating point: tdr is monotone in the fdr target") {
    std::mt19937_64 rng(137u);
    for (int trial = 0; trial < 50; ++trial) {
      const std::vector<double> live = random_scores(rng, 40, 16);
      const std::vector<double> spoof = random_scores(rng, 40, 16);
      double prev = -1.0;
      for (double target : {0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0}) {
        const double tdr = fpad::tdr_at_fdr(live, spoof, target).tdr;
        CHECK(tdr >= prev);
        prev = tdr;
      }
    }
  }

  TEST_CASE("operating point: input validation") {
    const std::vector<double> ok{0.5};
    CHECK(testutil::thrown_code([&] { fpad::tdr_at_fdr({}, ok, 0.1); }) ==
          fpad::Errc::EmptyInput);
    CHECK(testutil::thrown_code([&] { fpad::tdr_at_fdr(ok, {}, 0.1); }) ==
          fpad::Errc::EmptyInput);
    CHECK(testutil::thrown_code([&] { fpad::tdr_at_fdr({1.2}, ok, 0.1); }) ==
          fpad::Errc::InvalidData);
    CHECK(testutil::thrown_code([&] { fpad::tdr_at_fdr(ok, ok, -0.1); }) ==
          fpad::Errc::InvalidArgument);
    CHECK(testutil::thrown_code([&] { fpad::tdr_at_fdr(ok, ok, 1.5); }) ==
          fpad::Errc::InvalidArgument);
  }

  TEST_CASE("per-class rates: live counts below, spoof at or above") {
    const std::vector<ClassScores> classes{
        {"live", true, {0.1, 0.49, 0.5, 0.9}},
        {"gelatin", false, {0.5, 0.51, 0.2}},
    };
    const auto rates = fpad::per_class_rates(classes, 0.5);
    REQUIRE(rates.size() == 2);
    // 0.5 sits on the spoof side of the boundary for both classes
    CHECK(rates[0].correct_rate == 0.5);
    CHECK(rates[0].count == 4);
    CHECK(rates[0].is_live);
    CHECK(rates[1].correct_rate == doctest::Approx(2.0 / 3.0));
    CHECK(rates[1].count == 3);
    CHECK_FALSE(rates[1].is_live);
  }

  TEST_CASE("per-class rates: empty input guards") {
    CHECK(testutil::thrown_code([] { fpad::per_class_rates({}, 0.5); }) ==
          fpad::Errc::EmptyInput);
    const std::vector<ClassScores> with_empty{{"live", true, {}}};
    CHECK(testutil::thrown_code([&] { fpad::per_class_rates(with_empty, 0.5); }) ==
          fpad::Errc::EmptyInput);
  }
}
