#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>

#include "fpad/features.hpp"
#include "fpad/raster.hpp"

namespace fpad {

// One circularly symmetric neighbor set: P samples on a radius-R circle.
struct LbpScale {
  int neighbors;  // P
  double radius;  // R

  void validate() const;
};

/// The three spatial resolutions used throughout: (8,1), (16,2), (24,3).
constexpr std::array<LbpScale, 3> kDefaultScales{{{8, 1.0}, {16, 2.0}, {24, 3.0}}};

/// Pixels closer than this to any border are skipped; sampling inside the
/// margin always has full bilinear support.
int interior_margin(const LbpScale& scale);

/// Samples the P neighbors of (x, y): neighbor p sits at offset
/// (R cos(2 pi p / P), -R sin(2 pi p / P)), bilinearly interpolated.
/// Offsets within 1e-9 of an integer are snapped and read exactly. The
/// (8,1) scale reads the 8 immediate grid neighbors, no interpolation.
Eigen::VectorXd sample_neighbors(const ChannelView& channel, int x, int y, const LbpScale& scale);

/// Rotation-invariant uniform code: popcount of the thresholded neighbor
/// bits s(g_p - g_c) when the circular bit string has at most two 0/1
/// transitions, else P+1. s(x) = 1 for x >= 0. Codes lie in [0, P+1].
int lbp_code(double center, std::span<const double> neighbors);

/// (P+2)-bin L1-normalized histogram of codes over all interior pixels,
/// thresholding centers from center_ch against neighbors sampled from
/// neighbor_ch (same channel for plain LBP, distinct for opponent pairs).
Eigen::VectorXd uniform_lbp_histogram(const ChannelView& center_ch, const ChannelView& neighbor_ch,
                                      const LbpScale& scale);

/// H(8,1) || H(16,2) || H(24,3) on the single gray channel: 10+18+26 = 54 dims.
FeatureVector grayscale_lbp_feature(const RasterImage& img, Stream stream = Stream::Cots);

/// Color LBP over all 9 ordered channel pairs (center channel outer loop,
/// neighbor channel inner), three scales per pair: 9 x 54 = 486 dims.
FeatureVector clbp_feature(const RasterImage& img, Stream stream);

/// FTIR-stream CLBP followed by direct-stream CLBP: 972 dims.
FeatureVector fuse_features(const FeatureVector& ftir, const FeatureVector& direct);

}  // namespace fpad
