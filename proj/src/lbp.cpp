#include "fpad/lbp.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace fpad {
namespace {

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

// Fixed sampling geometry of one scale: integer base offset plus constant
// fractional weights per neighbor direction. Offsets within 1e-9 of an
// integer are snapped so axis-aligned samples are read exactly.
struct SamplePoint {
  enum class Kind { Exact, Horiz, Vert, Bilinear };
  int dx0, dy0;
  double fx, fy;
  Kind kind;
};

// The unit scale reads the full 8-neighborhood on the pixel grid, so no
// interpolation happens at (8,1); larger rings sample the circle at
// (R cos(2*pi*p/P), -R sin(2*pi*p/P)) with offsets snapped to integers when
// within 1e-9.
std::vector<SamplePoint> neighbor_geometry(const LbpScale& scale) {
  static constexpr int kUnitRing[8][2] = {{1, 0},  {1, -1}, {0, -1}, {-1, -1},
                                          {-1, 0}, {-1, 1}, {0, 1},  {1, 1}};
  std::vector<SamplePoint> pts(scale.neighbors);
  for (int p = 0; p < scale.neighbors; ++p) {
    double dx, dy;
    if (scale.neighbors == 8 && scale.radius == 1.0) {
      dx = kUnitRing[p][0];
      dy = kUnitRing[p][1];
    } else {
      const double angle = 2.0 * std::numbers::pi * p / scale.neighbors;
      dx = scale.radius * std::cos(angle);
      dy = -scale.radius * std::sin(angle);
      if (std::abs(dx - std::round(dx)) <= 1e-9) dx = std::round(dx);
      if (std::abs(dy - std::round(dy)) <= 1e-9) dy = std::round(dy);
    }
    SamplePoint& sp = pts[p];
    sp.dx0 = static_cast<int>(std::floor(dx));
    sp.dy0 = static_cast<int>(std::floor(dy));
    sp.fx = dx - sp.dx0;
    sp.fy = dy - sp.dy0;
    if (sp.fx == 0.0 && sp.fy == 0.0)
      sp.kind = SamplePoint::Kind::Exact;
    else if (sp.fy == 0.0)
      sp.kind = SamplePoint::Kind::Horiz;
    else if (sp.fx == 0.0)
      sp.kind = SamplePoint::Kind::Vert;
    else
      sp.kind = SamplePoint::Kind::Bilinear;
  }
  return pts;
}

inline double sample_plane(const std::uint8_t* plane, int width, const SamplePoint& sp, int x,
                           int y) {
  const std::uint8_t* base = plane + static_cast<std::size_t>(y + sp.dy0) * width + (x + sp.dx0);
  switch (sp.kind) {
    case SamplePoint::Kind::Exact:
      return base[0];
    case SamplePoint::Kind::Horiz:
      return lerp(base[0], base[1], sp.fx);
    case SamplePoint::Kind::Vert:
      return lerp(base[0], base[width], sp.fy);
    case SamplePoint::Kind::Bilinear: {
      const double top = lerp(base[0], base[1], sp.fx);
      const double bot = lerp(base[width], base[width + 1], sp.fx);
      return lerp(top, bot, sp.fy);
    }
  }
  return 0.0;
}

inline double sample_view(const ChannelView& ch, const SamplePoint& sp, int x, int y) {
  const int x0 = x + sp.dx0, y0 = y + sp.dy0;
  switch (sp.kind) {
    case SamplePoint::Kind::Exact:
      return ch.at(x0, y0);
    case SamplePoint::Kind::Horiz:
      return lerp(ch.at(x0, y0), ch.at(x0 + 1, y0), sp.fx);
    case SamplePoint::Kind::Vert:
      return lerp(ch.at(x0, y0), ch.at(x0, y0 + 1), sp.fy);
    case SamplePoint::Kind::Bilinear: {
      const double top = lerp(ch.at(x0, y0), ch.at(x0 + 1, y0), sp.fx);
      const double bot = lerp(ch.at(x0, y0 + 1), ch.at(x0 + 1, y0 + 1), sp.fx);
      return lerp(top, bot, sp.fy);
    }
  }
  return 0.0;
}

// Circular transition count and popcount binning of the thresholded bits.
inline int code_from_bits(std::uint32_t bits, int p_count) {
  const std::uint32_t mask = (1u << p_count) - 1u;
  const std::uint32_t rotated = ((bits << 1) | (bits >> (p_count - 1))) & mask;
  const int transitions = std::popcount(bits ^ rotated);
  return transitions <= 2 ? std::popcount(bits) : p_count + 1;
}

Eigen::VectorXd normalized(const std::vector<std::int64_t>& counts) {
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  Eigen::VectorXd h(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i)
    h(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]) / total;
  return h;
}

std::array<std::vector<std::uint8_t>, 3> split_planes(const RasterImage& img) {
  const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
  std::array<std::vector<std::uint8_t>, 3> planes;
  for (auto& p : planes) p.resize(n);
  const std::uint8_t* in = img.samples().data();
  for (std::size_t i = 0; i < n; ++i) {
    planes[0][i] = in[i * 3 + 0];
    planes[1][i] = in[i * 3 + 1];
    planes[2][i] = in[i * 3 + 2];
  }
  return planes;
}

}  // namespace

void LbpScale::validate() const {
  if (neighbors < 4 || neighbors > 31)
    raise(Errc::InvalidArgument, "LBP neighbor count must be in [4, 31]");
  if (radius < 1.0) raise(Errc::InvalidArgument, "LBP radius must be at least 1");
}

int interior_margin(const LbpScale& scale) {
  return static_cast<int>(std::ceil(scale.radius)) + 1;
}

Eigen::VectorXd sample_neighbors(const ChannelView& channel, int x, int y,
                                 const LbpScale& scale) {
  scale.validate();
  const int m = interior_margin(scale);
  if (x < m || y < m || x > channel.width() - 1 - m || y > channel.height() - 1 - m)
    raise(Errc::OutOfBounds, "pixel too close to the border for this scale");
  const auto geometry = neighbor_geometry(scale);
  Eigen::VectorXd out(scale.neighbors);
  for (int p = 0; p < scale.neighbors; ++p) out(p) = sample_view(channel, geometry[p], x, y);
  return out;
}

int lbp_code(double center, std::span<const double> neighbors) {
  const int p_count = static_cast<int>(neighbors.size());
  if (p_count < 4 || p_count > 31)
    raise(Errc::InvalidArgument, "neighbor count must be in [4, 31]");
  std::uint32_t bits = 0;
  for (int p = 0; p < p_count; ++p)
    bits |= static_cast<std::uint32_t>(neighbors[p] >= center) << p;
  return code_from_bits(bits, p_count);
}

Eigen::VectorXd uniform_lbp_histogram(const ChannelView& center_ch,
                                      const ChannelView& neighbor_ch, const LbpScale& scale) {
  scale.validate();
  if (center_ch.width() != neighbor_ch.width() || center_ch.height() != neighbor_ch.height())
    raise(Errc::DimensionMismatch, "center and neighbor channels differ in size");
  const int m = interior_margin(scale);
  const int w = center_ch.width(), h = center_ch.height();
  if (w < 2 * m + 1 || h < 2 * m + 1)
    raise(Errc::ImageTooSmall, "image has no interior pixels at this scale");

  const auto geometry = neighbor_geometry(scale);
  std::vector<std::int64_t> counts(scale.neighbors + 2, 0);
  for (int y = m; y <= h - 1 - m; ++y) {
    for (int x = m; x <= w - 1 - m; ++x) {
      const double center = center_ch.at(x, y);
      std::uint32_t bits = 0;
      for (int p = 0; p < scale.neighbors; ++p)
        bits |= static_cast<std::uint32_t>(sample_view(neighbor_ch, geometry[p], x, y) >= center)
                << p;
      counts[code_from_bits(bits, scale.neighbors)]++;
    }
  }
  return normalized(counts);
}

FeatureVector grayscale_lbp_feature(const RasterImage& img, Stream stream) {
  if (img.space() != ColorSpace::Gray)
    raise(Errc::InvalidSpace, "grayscale_lbp_feature expects a grayscale image");
  const ChannelView ch(img);
  Eigen::VectorXd values(descriptor_dim(Descriptor::Gray54));
  Eigen::Index at = 0;
  for (const auto& scale : kDefaultScales) {
    Eigen::VectorXd h = uniform_lbp_histogram(ch, ch, scale);
    values.segment(at, h.size()) = h;
    at += h.size();
  }
  return {std::move(values), Descriptor::Gray54, stream};
}

FeatureVector clbp_feature(const RasterImage& img, Stream stream) {
  if (img.space() != ColorSpace::Hsv)
    raise(Errc::InvalidSpace, "clbp_feature expects a 3-channel HSV image");
  const int w = img.width(), h = img.height();
  for (const auto& scale : kDefaultScales) {
    const int m = interior_margin(scale);
    if (w < 2 * m + 1 || h < 2 * m + 1)
      raise(Errc::ImageTooSmall, "image has no interior pixels at scale R=" +
                                     std::to_string(scale.radius));
  }

  const auto planes = split_planes(img);

  // counts[scale][center][neighbor][bin]; neighbor samples of one pass are
  // shared across the three center channels, which is where the per-image
  // latency budget is won.
  std::array<std::array<std::array<std::vector<std::int64_t>, 3>, 3>, 3> counts;
  for (std::size_t s = 0; s < kDefaultScales.size(); ++s) {
    const LbpScale& scale = kDefaultScales[s];
    const auto geometry = neighbor_geometry(scale);
    const int m = interior_margin(scale);
    const int p_count = scale.neighbors;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) counts[s][i][j].assign(p_count + 2, 0);

    double samples[32];
    for (int j = 0; j < 3; ++j) {
      const std::uint8_t* neighbor_plane = planes[j].data();
      for (int y = m; y <= h - 1 - m; ++y) {
        for (int x = m; x <= w - 1 - m; ++x) {
          for (int p = 0; p < p_count; ++p)
            samples[p] = sample_plane(neighbor_plane, w, geometry[p], x, y);
          const std::size_t px = static_cast<std::size_t>(y) * w + x;
          for (int i = 0; i < 3; ++i) {
            const double center = planes[i][px];
            std::uint32_t bits = 0;
            for (int p = 0; p < p_count; ++p)
              bits |= static_cast<std::uint32_t>(samples[p] >= center) << p;
            counts[s][i][j][code_from_bits(bits, p_count)]++;
          }
        }
      }
    }
  }

  Eigen::VectorXd values(descriptor_dim(Descriptor::Clbp486));
  Eigen::Index at = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (std::size_t s = 0; s < kDefaultScales.size(); ++s) {
        Eigen::VectorXd block = normalized(counts[s][i][j]);
        values.segment(at, block.size()) = block;
        at += block.size();
      }
    }
  }
  return {std::move(values), Descriptor::Clbp486, stream};
}

FeatureVector fuse_features(const FeatureVector& ftir, const FeatureVector& direct) {
  if (ftir.descriptor != Descriptor::Clbp486 || direct.descriptor != Descriptor::Clbp486)
    raise(Errc::DescriptorMismatch, "fusion takes two CLBP_486 feature vectors");
  if (ftir.stream != Stream::Ftir || direct.stream != Stream::Direct)
    raise(Errc::DescriptorMismatch, "fusion order is fixed: FTIR stream first, then DIRECT");
  Eigen::VectorXd values(descriptor_dim(Descriptor::Fusion972));
  values << ftir.values, direct.values;
  return {std::move(values), Descriptor::Fusion972, Stream::Fused};
}

}  // namespace fpad
