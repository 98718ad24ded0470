#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fpad/lbp.hpp"

namespace {

using fpad::ChannelView;
using fpad::ColorSpace;
using fpad::LbpScale;
using fpad::RasterImage;

// Reference implementations written straight from the definitions, sharing no
// machinery with the library. The sampling convention is the documented one:
// the unit scale reads the 8 immediate grid neighbors, larger rings sample the
// circle at (R cos(2 pi p/P), -R sin(2 pi p/P)) with near-integer offsets
// snapped, fractional weights taken from the offset's fractional part, and
// values bilinearly interpolated via nested single-axis lerps.
void oracle_offset(int P, double R, int p, double& dx, double& dy) {
  static const int unit_ring[8][2] = {{1, 0},  {1, -1}, {0, -1}, {-1, -1},
                                      {-1, 0}, {-1, 1}, {0, 1},  {1, 1}};
  if (P == 8 && R == 1.0) {
    dx = unit_ring[p][0];
    dy = unit_ring[p][1];
    return;
  }
  const double angle = 2.0 * std::numbers::pi * p / P;
  dx = R * std::cos(angle);
  dy = -R * std::sin(angle);
  if (std::abs(dx - std::round(dx)) <= 1e-9) dx = std::round(dx);
  if (std::abs(dy - std::round(dy)) <= 1e-9) dy = std::round(dy);
}

double oracle_sample(const ChannelView& ch, int cx, int cy, int P, double R, int p) {
  double dx, dy;
  oracle_offset(P, R, p, dx, dy);
  const int x0 = cx + static_cast<int>(std::floor(dx));
  const int y0 = cy + static_cast<int>(std::floor(dy));
  const double fx = dx - std::floor(dx);
  const double fy = dy - std::floor(dy);
  const double a = ch.at(x0, y0), b = ch.at(x0 + 1, y0);
  const double c = ch.at(x0, y0 + 1), d = ch.at(x0 + 1, y0 + 1);
  const double top = a + fx * (b - a);
  const double bot = c + fx * (d - c);
  return top + fy * (bot - top);
}

// Thresholded bits, circular transition count as a sum of adjacent absolute
// differences, popcount binning with the catch-all non-uniform bin.
int oracle_code(double center, const std::vector<double>& g) {
  const int P = static_cast<int>(g.size());
  std::vector<int> s(P);
  for (int p = 0; p < P; ++p) s[p] = g[p] >= center ? 1 : 0;
  int u = std::abs(s[P - 1] - s[0]);
  for (int p = 1; p < P; ++p) u += std::abs(s[p] - s[p - 1]);
  if (u > 2) return P + 1;
  int ones = 0;
  for (int p = 0; p < P; ++p) ones += s[p];
  return ones;
}

Eigen::VectorXd oracle_histogram(const ChannelView& center_ch, const ChannelView& neighbor_ch,
                                 int P, double R) {
  const int m = static_cast<int>(std::ceil(R)) + 1;
  std::vector<std::int64_t> bins(P + 2, 0);
  std::int64_t total = 0;
  std::vector<double> g(P);
  for (int y = m; y <= center_ch.height() - 1 - m; ++y) {
    for (int x = m; x <= center_ch.width() - 1 - m; ++x) {
      for (int p = 0; p < P; ++p) g[p] = oracle_sample(neighbor_ch, x, y, P, R, p);
      bins[oracle_code(center_ch.at(x, y), g)]++;
      total++;
    }
  }
  Eigen::VectorXd h(P + 2);
  for (int i = 0; i < P + 2; ++i) h(i) = static_cast<double>(bins[i]) / total;
  return h;
}

RasterImage random_gray(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng() & 0xff);
  return {w, h, ColorSpace::Gray, std::move(px)};
}

RasterImage random_hsv(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng() & 0xff);
  return {w, h, ColorSpace::Hsv, std::move(px)};
}

RasterImage rotate90(const RasterImage& img) {
  RasterImage out = RasterImage::filled(img.height(), img.width(), img.space(), 0);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c) out.at(y, img.width() - 1 - x, c) = img.at(x, y, c);
  return out;
}

bool exactly_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

}  // namespace

TEST_SUITE("lbp") {
  TEST_CASE("scale validation bounds") {
    CHECK_NOTHROW((LbpScale{8, 1.0}).validate());
    CHECK_THROWS_AS((LbpScale{3, 1.0}).validate(), fpad::Error);
    CHECK_THROWS_AS((LbpScale{32, 1.0}).validate(), fpad::Error);
    CHECK_THROWS_AS((LbpScale{8, 0.5}).validate(), fpad::Error);
  }

  TEST_CASE("interior margin per scale") {
    CHECK(fpad::interior_margin({8, 1.0}) == 2);
    CHECK(fpad::interior_margin({16, 2.0}) == 3);
    CHECK(fpad::interior_margin({24, 3.0}) == 4);
  }

  TEST_CASE("code: all neighbors equal to center gives P") {
    for (int p_count : {8, 16, 24}) {
      std::vector<double> g(p_count, 93.0);
      CHECK(fpad::lbp_code(93.0, g) == p_count);
    }
  }

  TEST_CASE("code: all neighbors strictly below center gives 0") {
    std::vector<double> g(8, 50.0);
    CHECK(fpad::lbp_code(51.0, g) == 0);
  }

  TEST_CASE("code: alternating neighbors at P=8 land in the non-uniform bin") {
    std::vector<double> g(8);
    for (int p = 0; p < 8; ++p) g[p] = p % 2 ? 200.0 : 10.0;
    CHECK(fpad::lbp_code(100.0, g) == 9);
  }

  TEST_CASE("code: every 8-bit pattern matches the transition-count oracle") {
    const double center = 128.0;
    for (int pattern = 0; pattern < 256; ++pattern) {
      std::vector<double> g(8);
      for (int p = 0; p < 8; ++p) g[p] = (pattern >> p) & 1 ? 129.0 : 127.0;
      CHECK(fpad::lbp_code(center, g) == oracle_code(center, g));
    }
  }

  TEST_CASE("code: uniform patterns split into P+1 popcount classes") {
    // Of the 256 possible bit strings, the classic P(P-1)+2 = 58 are uniform;
    // their codes cover 0..8 and everything else shares bin 9.
    int uniform = 0;
    std::vector<bool> seen(10, false);
    for (int pattern = 0; pattern < 256; ++pattern) {
      std::vector<double> g(8);
      for (int p = 0; p < 8; ++p) g[p] = (pattern >> p) & 1 ? 129.0 : 127.0;
      const int code = fpad::lbp_code(128.0, g);
      REQUIRE(code >= 0);
      REQUIRE(code <= 9);
      seen[code] = true;
      if (code < 9) uniform++;
    }
    CHECK(uniform == 58);
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
  }

  TEST_CASE("sampling: unit scale reads the 8 immediate neighbors exactly") {
    const RasterImage img = random_gray(9, 9, 17u);
    const ChannelView ch(img);
    const Eigen::VectorXd g = fpad::sample_neighbors(ch, 4, 4, {8, 1.0});
    REQUIRE(g.size() == 8);
    const int ring[8][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}};
    for (int p = 0; p < 8; ++p) {
      CHECK(g(p) == static_cast<double>(ch.at(4 + ring[p][0], 4 + ring[p][1])));
      CHECK(g(p) == std::floor(g(p)));
    }
  }

  TEST_CASE("sampling: constant image gives P copies of the constant") {
    const RasterImage img = RasterImage::filled(16, 16, ColorSpace::Gray, 77);
    const ChannelView ch(img);
    for (const auto& scale : fpad::kDefaultScales) {
      const Eigen::VectorXd g = fpad::sample_neighbors(ch, 8, 8, scale);
      REQUIRE(g.size() == scale.neighbors);
      for (Eigen::Index p = 0; p < g.size(); ++p) CHECK(g(p) == 77.0);
    }
  }

  TEST_CASE("sampling: (16,2) matches a scalar bilinear evaluation on a ramp") {
    // On the linear ramp v = 2x + 5y bilinear interpolation reproduces the
    // ramp itself, so each sample must equal v evaluated at the offset point.
    RasterImage img = RasterImage::filled(24, 24, ColorSpace::Gray, 0);
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x) img.at(x, y) = static_cast<std::uint8_t>(2 * x + 5 * y);
    const ChannelView ch(img);
    const int cx = 11, cy = 12;
    const Eigen::VectorXd g = fpad::sample_neighbors(ch, cx, cy, {16, 2.0});
    for (int p : {1, 3, 7, 13}) {
      const double angle = 2.0 * std::numbers::pi * p / 16;
      const double sx = cx + 2.0 * std::cos(angle);
      const double sy = cy - 2.0 * std::sin(angle);
      CHECK(g(p) == doctest::Approx(2.0 * sx + 5.0 * sy).epsilon(1e-12));
    }
  }

  TEST_CASE("sampling: border violation is rejected") {
    const RasterImage img = random_gray(16, 16, 3u);
    const ChannelView ch(img);
    CHECK_THROWS_AS(fpad::sample_neighbors(ch, 1, 8, {8, 1.0}), fpad::Error);
    CHECK_THROWS_AS(fpad::sample_neighbors(ch, 8, 14, {16, 2.0}), fpad::Error);
    CHECK_NOTHROW(fpad::sample_neighbors(ch, 2, 2, {8, 1.0}));
  }

  TEST_CASE("histogram: constant image puts all mass in bin P") {
    const RasterImage img = RasterImage::filled(20, 20, ColorSpace::Gray, 131);
    const ChannelView ch(img);
    for (const auto& scale : fpad::kDefaultScales) {
      const Eigen::VectorXd h = fpad::uniform_lbp_histogram(ch, ch, scale);
      REQUIRE(h.size() == scale.neighbors + 2);
      for (Eigen::Index i = 0; i < h.size(); ++i)
        CHECK(h(i) == (i == scale.neighbors ? 1.0 : 0.0));
    }
  }

  TEST_CASE("histogram: 12x12 random image equals the per-pixel oracle exactly") {
    const RasterImage img = random_gray(12, 12, 2024u);
    const ChannelView ch(img);
    const Eigen::VectorXd h = fpad::uniform_lbp_histogram(ch, ch, {8, 1.0});
    CHECK(exactly_equal(h, oracle_histogram(ch, ch, 8, 1.0)));
  }

  TEST_CASE("histogram: oracle equivalence at every scale, same and cross channel") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const RasterImage a = random_gray(16, 16, 100 + seed);
      const RasterImage b = random_gray(16, 16, 200 + seed);
      const ChannelView ca(a), cb(b);
      for (const auto& scale : fpad::kDefaultScales) {
        CHECK(exactly_equal(fpad::uniform_lbp_histogram(ca, ca, scale),
                            oracle_histogram(ca, ca, scale.neighbors, scale.radius)));
        CHECK(exactly_equal(fpad::uniform_lbp_histogram(ca, cb, scale),
                            oracle_histogram(ca, cb, scale.neighbors, scale.radius)));
      }
    }
  }

  TEST_CASE("histogram: sums to one and stays nonnegative on random input") {
    const RasterImage img = random_gray(32, 32, 5u);
    const ChannelView ch(img);
    for (const auto& scale : fpad::kDefaultScales) {
      const Eigen::VectorXd h = fpad::uniform_lbp_histogram(ch, ch, scale);
      CHECK(h.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(h.minCoeff() >= 0.0);
    }
  }

  TEST_CASE("histogram: exact invariance under square rotations at the unit scale") {
    const RasterImage img = random_gray(20, 20, 77u);
    const Eigen::VectorXd h0 = fpad::uniform_lbp_histogram(ChannelView(img), ChannelView(img),
                                                           {8, 1.0});
    RasterImage rotated = img;
    for (int turns = 0; turns < 3; ++turns) {
      rotated = rotate90(rotated);
      const Eigen::VectorXd h = fpad::uniform_lbp_histogram(ChannelView(rotated),
                                                            ChannelView(rotated), {8, 1.0});
      CHECK(exactly_equal(h, h0));
    }
  }

  TEST_CASE("histogram: adding a constant to both channels changes no code") {
    RasterImage img = random_gray(18, 18, 9u);
    for (auto& v : img.samples()) v = static_cast<std::uint8_t>(20 + v % 180);
    RasterImage shifted = img;
    for (auto& v : shifted.samples()) v = static_cast<std::uint8_t>(v + 40);
    for (const auto& scale : fpad::kDefaultScales) {
      CHECK(exactly_equal(
          fpad::uniform_lbp_histogram(ChannelView(img), ChannelView(img), scale),
          fpad::uniform_lbp_histogram(ChannelView(shifted), ChannelView(shifted), scale)));
    }
  }

  TEST_CASE("histogram: input validation") {
    const RasterImage a = random_gray(16, 16, 1u);
    const RasterImage b = random_gray(12, 16, 1u);
    const RasterImage tiny = random_gray(4, 4, 1u);
    CHECK_THROWS_AS(fpad::uniform_lbp_histogram(ChannelView(a), ChannelView(b), {8, 1.0}),
                    fpad::Error);
    CHECK_THROWS_AS(fpad::uniform_lbp_histogram(ChannelView(tiny), ChannelView(tiny), {8, 1.0}),
                    fpad::Error);
    const RasterImage smallest = random_gray(5, 5, 2u);
    CHECK_NOTHROW(
        fpad::uniform_lbp_histogram(ChannelView(smallest), ChannelView(smallest), {8, 1.0}));
  }

  TEST_CASE("gray54: dimension and block layout") {
    const RasterImage img = random_gray(24, 24, 11u);
    const fpad::FeatureVector f = fpad::grayscale_lbp_feature(img);
    CHECK(f.descriptor == fpad::Descriptor::Gray54);
    REQUIRE(f.values.size() == 54);
    const ChannelView ch(img);
    Eigen::Index at = 0;
    for (const auto& scale : fpad::kDefaultScales) {
      const Eigen::VectorXd h = fpad::uniform_lbp_histogram(ch, ch, scale);
      CHECK(exactly_equal(f.values.segment(at, h.size()), h));
      at += h.size();
    }
    CHECK(at == 54);
  }

  TEST_CASE("gray54: constant image concentrates each block at its bin P") {
    const fpad::FeatureVector f =
        fpad::grayscale_lbp_feature(RasterImage::filled(24, 24, ColorSpace::Gray, 55));
    CHECK(f.values(8) == 1.0);
    CHECK(f.values(10 + 16) == 1.0);
    CHECK(f.values(10 + 18 + 24) == 1.0);
    CHECK(f.values.sum() == doctest::Approx(3.0));
  }

  TEST_CASE("gray54: rejects color input") {
    CHECK_THROWS_AS(fpad::grayscale_lbp_feature(random_hsv(16, 16, 1u)), fpad::Error);
  }

  TEST_CASE("clbp486: dimension and brute-force equivalence over the 9 pairs") {
    const RasterImage img = random_hsv(16, 16, 31u);
    const fpad::FeatureVector f = fpad::clbp_feature(img, fpad::Stream::Ftir);
    CHECK(f.descriptor == fpad::Descriptor::Clbp486);
    CHECK(f.stream == fpad::Stream::Ftir);
    REQUIRE(f.values.size() == 486);
    Eigen::Index at = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const ChannelView ci(img, i), cj(img, j);
        for (const auto& scale : fpad::kDefaultScales) {
          const Eigen::VectorXd h = oracle_histogram(ci, cj, scale.neighbors, scale.radius);
          CHECK(exactly_equal(f.values.segment(at, h.size()), h));
          at += h.size();
        }
      }
    }
    CHECK(at == 486);
  }

  TEST_CASE("clbp486: identical channels make the 9 pair blocks identical") {
    const RasterImage gray = random_gray(16, 16, 8u);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(16) * 16 * 3);
    for (int i = 0; i < 16 * 16; ++i)
      px[i * 3] = px[i * 3 + 1] = px[i * 3 + 2] = gray.samples()[i];
    const RasterImage img(16, 16, ColorSpace::Hsv, std::move(px));
    const fpad::FeatureVector f = fpad::clbp_feature(img, fpad::Stream::Direct);
    for (int pair = 1; pair < 9; ++pair)
      CHECK(exactly_equal(f.values.segment(pair * 54, 54), f.values.segment(0, 54)));
  }

  TEST_CASE("clbp486: rejects non-HSV input") {
    std::vector<std::uint8_t> px(16 * 16 * 3, 0);
    const RasterImage rgb(16, 16, ColorSpace::Rgb, std::move(px));
    CHECK_THROWS_AS(fpad::clbp_feature(rgb, fpad::Stream::Ftir), fpad::Error);
    CHECK_THROWS_AS(fpad::clbp_feature(random_gray(16, 16, 1u), fpad::Stream::Ftir), fpad::Error);
  }

  TEST_CASE("fusion: concatenates FTIR features first") {
    const fpad::FeatureVector a = fpad::clbp_feature(random_hsv(16, 16, 41u), fpad::Stream::Ftir);
    const fpad::FeatureVector b =
        fpad::clbp_feature(random_hsv(16, 16, 42u), fpad::Stream::Direct);
    const fpad::FeatureVector fused = fpad::fuse_features(a, b);
    CHECK(fused.descriptor == fpad::Descriptor::Fusion972);
    CHECK(fused.stream == fpad::Stream::Fused);
    REQUIRE(fused.values.size() == 972);
    CHECK(exactly_equal(fused.values.head(486), a.values));
    CHECK(exactly_equal(fused.values.tail(486), b.values));
  }

  TEST_CASE("fusion: marker probes pin the component order") {
    fpad::FeatureVector a{Eigen::VectorXd::Zero(486), fpad::Descriptor::Clbp486,
                          fpad::Stream::Ftir};
    fpad::FeatureVector b{Eigen::VectorXd::Zero(486), fpad::Descriptor::Clbp486,
                          fpad::Stream::Direct};
    a.values(7) = 1.0;
    b.values(11) = 1.0;
    const fpad::FeatureVector fused = fpad::fuse_features(a, b);
    CHECK(fused.values(7) == 1.0);
    CHECK(fused.values(486 + 11) == 1.0);
    CHECK(fused.values.sum() == 2.0);
  }

  TEST_CASE("fusion: stream and descriptor mismatches are rejected") {
    const fpad::FeatureVector ftir =
        fpad::clbp_feature(random_hsv(16, 16, 51u), fpad::Stream::Ftir);
    const fpad::FeatureVector direct =
        fpad::clbp_feature(random_hsv(16, 16, 52u), fpad::Stream::Direct);
    CHECK_THROWS_AS(fpad::fuse_features(direct, ftir), fpad::Error);
    CHECK_THROWS_AS(fpad::fuse_features(ftir, ftir), fpad::Error);
    const fpad::FeatureVector gray =
        fpad::grayscale_lbp_feature(random_gray(16, 16, 53u), fpad::Stream::Ftir);
    CHECK_THROWS_AS(fpad::fuse_features(gray, direct), fpad::Error);
  }

  TEST_CASE("determinism: identical images give bit-identical features") {
    const RasterImage img = random_hsv(20, 20, 60u);
    const fpad::FeatureVector f1 = fpad::clbp_feature(img, fpad::Stream::Ftir);
    const fpad::FeatureVector f2 = fpad::clbp_feature(img, fpad::Stream::Ftir);
    CHECK(exactly_equal(f1.values, f2.values));
  }
}
