#include "fpad/calibration.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace fpad {

Eigen::Matrix3d CalibrationProfile::matrix() const {
  Eigen::Matrix3d m;
  m << params[0], params[1], params[2],
       params[3], params[4], params[5],
       params[6], params[7], 1.0;
  return m;
}

CalibrationProfile CalibrationProfile::identity(double native_ppi, double target_ppi) {
  CalibrationProfile p;
  p.native_ppi = native_ppi;
  p.target_ppi = target_ppi;
  return p;
}

CalibrationProfile CalibrationProfile::from_matrix(const Eigen::Matrix3d& m, double native_ppi,
                                                   double target_ppi) {
  if (std::abs(m(2, 2)) < 1e-12)
    raise(Errc::DegenerateConfiguration, "matrix (3,3) entry must be nonzero");
  Eigen::Matrix3d n = m / m(2, 2);
  CalibrationProfile p;
  p.params = {n(0, 0), n(0, 1), n(0, 2), n(1, 0), n(1, 1), n(1, 2), n(2, 0), n(2, 1)};
  p.native_ppi = native_ppi;
  p.target_ppi = target_ppi;
  return p;
}

void CalibrationProfile::validate() const {
  if (native_ppi <= 0.0 || target_ppi <= 0.0)
    raise(Errc::InvalidData, "profile ppi values must be positive");
  for (double v : params)
    if (!std::isfinite(v)) raise(Errc::InvalidData, "profile parameters must be finite");
  if (std::abs(matrix().determinant()) <= 1e-12)
    raise(Errc::DegenerateConfiguration, "profile matrix is not invertible");
}

Eigen::Vector2d apply_perspective(const CalibrationProfile& profile, const Eigen::Vector2d& src) {
  const auto& p = profile.params;
  const double lambda = p[6] * src.x() + p[7] * src.y() + 1.0;
  if (std::abs(lambda) < 1e-15)
    raise(Errc::DegenerateConfiguration, "point maps to the line at infinity");
  return {(p[0] * src.x() + p[1] * src.y() + p[2]) / lambda,
          (p[3] * src.x() + p[4] * src.y() + p[5]) / lambda};
}

CalibrationProfile estimate_perspective(std::span<const PointCorrespondence> pairs,
                                        double native_ppi, double target_ppi) {
  if (pairs.size() < 4)
    raise(Errc::InsufficientData, "need at least 4 correspondences, got " +
                                      std::to_string(pairs.size()));
  for (const auto& pc : pairs)
    if (!pc.src.allFinite() || !pc.dst.allFinite())
      raise(Errc::InvalidData, "correspondences must be finite");

  // Each pair contributes two rows of the linearized system in (a..h):
  //   a x + b y + c               - g x x' - h y x' = x'
  //               d x + e y + f   - g x y' - h y y' = y'
  const Eigen::Index n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd A(2 * n, 8);
  Eigen::VectorXd rhs(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = pairs[i].src.x(), y = pairs[i].src.y();
    const double xp = pairs[i].dst.x(), yp = pairs[i].dst.y();
    A.row(2 * i) << x, y, 1, 0, 0, 0, -x * xp, -y * xp;
    A.row(2 * i + 1) << 0, 0, 0, x, y, 1, -x * yp, -y * yp;
    rhs(2 * i) = xp;
    rhs(2 * i + 1) = yp;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 8)
    raise(Errc::DegenerateConfiguration, "correspondence configuration is rank-deficient");
  Eigen::VectorXd sol = qr.solve(rhs);

  CalibrationProfile profile;
  for (int i = 0; i < 8; ++i) profile.params[i] = sol(i);
  profile.native_ppi = native_ppi;
  profile.target_ppi = target_ppi;
  profile.validate();
  return profile;
}

double max_reprojection_residual(const CalibrationProfile& profile,
                                 std::span<const PointCorrespondence> pairs) {
  double worst = 0.0;
  for (const auto& pc : pairs)
    worst = std::max(worst, (apply_perspective(profile, pc.src) - pc.dst).norm());
  return worst;
}

namespace {

// Bilinear sample of one channel at a real position. Positions outside
// [0, W-1] x [0, H-1] take the fill value; interior positions always have
// full support. Integer coordinates are read exactly.
double sample_bilinear(const RasterImage& img, int c, double sx, double sy, double fill) {
  const int w = img.width(), h = img.height();
  if (sx < 0.0 || sy < 0.0 || sx > w - 1.0 || sy > h - 1.0) return fill;
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const double fx = sx - x0;
  const double fy = sy - y0;
  auto lerp = [](double a, double b, double t) { return a + t * (b - a); };
  const double top = fx == 0.0 ? img.at(x0, y0, c)
                               : lerp(img.at(x0, y0, c), img.at(x0 + 1, y0, c), fx);
  if (fy == 0.0) return top;
  const double bot = fx == 0.0 ? img.at(x0, y0 + 1, c)
                               : lerp(img.at(x0, y0 + 1, c), img.at(x0 + 1, y0 + 1, c), fx);
  return lerp(top, bot, fy);
}

}  // namespace

RasterImage warp_perspective(const RasterImage& img, const CalibrationProfile& profile,
                             int out_width, int out_height) {
  profile.validate();
  if (out_width < 1 || out_height < 1)
    raise(Errc::InvalidArgument, "warp output size must be at least 1x1");

  const Eigen::Matrix3d inv = profile.matrix().inverse();
  const int channels = img.channels();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(out_width) * out_height * channels);

  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Eigen::Vector3d src = inv * Eigen::Vector3d(x, y, 1.0);
      std::uint8_t* px = &out[(static_cast<std::size_t>(y) * out_width + x) * channels];
      if (std::abs(src.z()) < 1e-12) {
        for (int c = 0; c < channels; ++c) px[c] = 255;
        continue;
      }
      const double sx = src.x() / src.z();
      const double sy = src.y() / src.z();
      for (int c = 0; c < channels; ++c)
        px[c] = round_to_u8(sample_bilinear(img, c, sx, sy, 255.0));
    }
  }
  return RasterImage(out_width, out_height, img.space(), std::move(out), img.ppi());
}

RasterImage resample_to_ppi(const RasterImage& img, double target_ppi) {
  if (!img.ppi()) raise(Errc::MissingMetadata, "image has no ppi tag");
  if (target_ppi <= 0.0) raise(Errc::InvalidArgument, "target ppi must be positive");
  const double native = *img.ppi();
  if (native < target_ppi)
    raise(Errc::Unsupported, "upsampling requested (native " + std::to_string(native) +
                                 " < target " + std::to_string(target_ppi) + " ppi)");

  const double factor = native / target_ppi;
  const int out_w = static_cast<int>(std::floor(img.width() * target_ppi / native));
  const int out_h = static_cast<int>(std::floor(img.height() * target_ppi / native));
  if (out_w < 1 || out_h < 1)
    raise(Errc::ImageTooSmall, "image too small to resample to the target ppi");

  const int channels = img.channels();

  // Separable box filter with exact partial-pixel overlap weights; a single
  // rounding at the very end.
  auto axis_weights = [factor](int out_idx, int limit, auto&& emit) {
    const double lo = out_idx * factor;
    const double hi = lo + factor;
    int i = static_cast<int>(std::floor(lo));
    for (; i < hi && i < limit; ++i) {
      const double cover_lo = std::max(lo, static_cast<double>(i));
      const double cover_hi = std::min(hi, static_cast<double>(i + 1));
      if (cover_hi > cover_lo) emit(i, cover_hi - cover_lo);
    }
  };

  // Horizontal pass into doubles, then vertical pass.
  std::vector<double> mid(static_cast<std::size_t>(out_w) * img.height() * channels, 0.0);
  for (int y = 0; y < img.height(); ++y) {
    for (int ox = 0; ox < out_w; ++ox) {
      double* acc = &mid[(static_cast<std::size_t>(y) * out_w + ox) * channels];
      axis_weights(ox, img.width(), [&](int ix, double w) {
        for (int c = 0; c < channels; ++c) acc[c] += w * img.at(ix, y, c);
      });
    }
  }

  std::vector<std::uint8_t> out(static_cast<std::size_t>(out_w) * out_h * channels);
  const double area = factor * factor;
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        axis_weights(oy, img.height(), [&](int iy, double w) {
          acc += w * mid[(static_cast<std::size_t>(iy) * out_w + ox) * channels + c];
        });
        out[(static_cast<std::size_t>(oy) * out_w + ox) * channels + c] =
            round_to_u8(acc / area);
      }
    }
  }
  return RasterImage(out_w, out_h, img.space(), std::move(out), target_ppi);
}

RasterImage process_ftir(const RasterImage& raw, const CalibrationProfile& profile) {
  profile.validate();
  RasterImage enhanced = negate(equalize_histogram(to_grayscale(raw)));
  RasterImage warped = warp_perspective(enhanced, profile, raw.width(), raw.height());
  warped.set_ppi(profile.native_ppi);
  return resample_to_ppi(warped, profile.target_ppi);
}

CalibrationProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::ParseError, path.string() + ": " + e.what());
  }
  CalibrationProfile p;
  try {
    p.version = j.at("version").get<std::string>();
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != 8) raise(Errc::ParseError, "profile params must have 8 entries");
    std::copy(params.begin(), params.end(), p.params.begin());
    p.native_ppi = j.at("native_ppi").get<double>();
    p.target_ppi = j.at("target_ppi").get<double>();
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::ParseError, path.string() + ": " + e.what());
  }
  p.validate();
  return p;
}

void save_profile(const CalibrationProfile& profile, const std::filesystem::path& path) {
  nlohmann::json j{{"version", profile.version},
                   {"params", profile.params},
                   {"native_ppi", profile.native_ppi},
                   {"target_ppi", profile.target_ppi}};
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace fpad
