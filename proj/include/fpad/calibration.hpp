#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <span>
#include <string>

#include "fpad/raster.hpp"

namespace fpad {

struct PointCorrespondence {
  Eigen::Vector2d src;
  Eigen::Vector2d dst;
};

// The eight perspective parameters (a..h) of the projective map
//   [x', y', 1]^T ~ [[a,b,c],[d,e,f],[g,h,1]] [x, y, 1]^T
// with scale lambda = g*x + h*y + 1, plus the resolution metadata needed to
// bring a frontalized print to the exchange resolution.
struct CalibrationProfile {
  std::array<double, 8> params{1, 0, 0, 0, 1, 0, 0, 0};
  double native_ppi = 900.0;
  double target_ppi = 500.0;
  std::string version = "fpad.profile/1";

  Eigen::Matrix3d matrix() const;
  static CalibrationProfile identity(double native_ppi, double target_ppi = 500.0);
  static CalibrationProfile from_matrix(const Eigen::Matrix3d& m, double native_ppi,
                                        double target_ppi = 500.0);

  /// Throws unless ppi values are positive and the matrix is invertible
  /// (|det| > 1e-12).
  void validate() const;
};

/// Forward map of a source point through the profile.
Eigen::Vector2d apply_perspective(const CalibrationProfile& profile, const Eigen::Vector2d& src);

/// Least-squares fit of the eight parameters from >= 4 correspondences; the
/// standard two-equations-per-pair linearization with the (3,3) entry fixed
/// at 1. Exactly four non-degenerate pairs are solved exactly.
CalibrationProfile estimate_perspective(std::span<const PointCorrespondence> pairs,
                                        double native_ppi, double target_ppi = 500.0);

double max_reprojection_residual(const CalibrationProfile& profile,
                                 std::span<const PointCorrespondence> pairs);

/// Inverse-mapping warp with bilinear interpolation; source positions outside
/// the input are filled with 255.
RasterImage warp_perspective(const RasterImage& img, const CalibrationProfile& profile,
                             int out_width, int out_height);

/// Area-average (box) downsampling from img.ppi to target_ppi with exact
/// fractional-pixel weights. Output dims are floor(dim * target / native).
RasterImage resample_to_ppi(const RasterImage& img, double target_ppi);

/// Full FTIR enhancement chain: grayscale -> histogram equalization ->
/// negation -> perspective warp -> resample to profile.target_ppi.
RasterImage process_ftir(const RasterImage& raw, const CalibrationProfile& profile);

CalibrationProfile load_profile(const std::filesystem::path& path);
void save_profile(const CalibrationProfile& profile, const std::filesystem::path& path);

}  // namespace fpad
