#include "fpad/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace fpad {

const char* to_string(ColorSpace space) {
  switch (space) {
    case ColorSpace::Rgb: return "RGB";
    case ColorSpace::Hsv: return "HSV";
    case ColorSpace::Gray: return "GRAY";
  }
  return "?";
}

const char* to_string(Errc code) {
  switch (code) {
    case Errc::InvalidSpace: return "invalid-space";
    case Errc::InvalidData: return "invalid-data";
    case Errc::InsufficientData: return "insufficient-data";
    case Errc::DegenerateConfiguration: return "degenerate-configuration";
    case Errc::MissingMetadata: return "missing-metadata";
    case Errc::Unsupported: return "unsupported";
    case Errc::OutOfBounds: return "out-of-bounds";
    case Errc::DimensionMismatch: return "dimension-mismatch";
    case Errc::ImageTooSmall: return "image-too-small";
    case Errc::DescriptorMismatch: return "descriptor-mismatch";
    case Errc::DegenerateLabels: return "degenerate-labels";
    case Errc::ParseError: return "parse-error";
    case Errc::ProtocolInfeasible: return "protocol-infeasible";
    case Errc::MissingStream: return "missing-stream";
    case Errc::EmptyInput: return "empty-input";
    case Errc::IoError: return "io-error";
    case Errc::InvalidArgument: return "invalid-argument";
  }
  return "error";
}

int channel_count(ColorSpace space) { return space == ColorSpace::Gray ? 1 : 3; }

std::uint8_t round_to_u8(double v) {
  double r = std::floor(v + 0.5);  // half-up
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

RasterImage::RasterImage(int width, int height, ColorSpace space,
                         std::vector<std::uint8_t> samples, std::optional<double> ppi)
    : width_(width),
      height_(height),
      channels_(channel_count(space)),
      space_(space),
      ppi_(ppi),
      samples_(std::move(samples)) {
  if (width_ < 1 || height_ < 1)
    raise(Errc::InvalidData, "image dimensions must be at least 1x1");
  if (samples_.size() != static_cast<std::size_t>(width_) * height_ * channels_)
    raise(Errc::InvalidData, "sample buffer size does not match width*height*channels");
  if (ppi_ && *ppi_ <= 0.0) raise(Errc::InvalidData, "ppi must be positive");
}

RasterImage RasterImage::filled(int width, int height, ColorSpace space, std::uint8_t value,
                                std::optional<double> ppi) {
  if (width < 1 || height < 1)
    raise(Errc::InvalidData, "image dimensions must be at least 1x1");
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(width) * height * channel_count(space),
                                value);
  return RasterImage(width, height, space, std::move(buf), ppi);
}

void RasterImage::set_ppi(std::optional<double> ppi) {
  if (ppi && *ppi <= 0.0) raise(Errc::InvalidData, "ppi must be positive");
  ppi_ = ppi;
}

ChannelView::ChannelView(const RasterImage& img, int channel)
    : data_(img.samples().data()),
      width_(img.width()),
      height_(img.height()),
      stride_(img.channels()),
      offset_(channel) {
  if (channel < 0 || channel >= img.channels())
    raise(Errc::OutOfBounds, "channel index out of range");
}

ChannelView::ChannelView(const RasterImage& img) : ChannelView(img, 0) {
  if (img.channels() != 1)
    raise(Errc::InvalidSpace, "expected a single-channel image");
}

RasterImage to_grayscale(const RasterImage& img) {
  if (img.space() != ColorSpace::Rgb)
    raise(Errc::InvalidSpace, "to_grayscale expects an RGB image");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width()) * img.height());
  const auto& in = img.samples();
  for (std::size_t i = 0, n = out.size(); i < n; ++i) {
    const std::uint8_t* px = &in[i * 3];
    out[i] = round_to_u8(0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]);
  }
  return RasterImage(img.width(), img.height(), ColorSpace::Gray, std::move(out), img.ppi());
}

RasterImage equalize_histogram(const RasterImage& img) {
  if (img.space() != ColorSpace::Gray)
    raise(Errc::InvalidSpace, "equalize_histogram expects a grayscale image");
  const auto& in = img.samples();
  const std::size_t n = in.size();

  std::array<std::size_t, 256> hist{};
  for (std::uint8_t v : in) hist[v]++;

  std::array<std::size_t, 256> cdf{};
  std::size_t running = 0;
  std::size_t cdf_min = 0;
  for (int v = 0; v < 256; ++v) {
    running += hist[v];
    cdf[v] = running;
    if (cdf_min == 0 && running > 0) cdf_min = running;
  }

  if (cdf_min == n) return img;  // single-valued image: remap undefined, keep as is

  std::array<std::uint8_t, 256> lut{};
  const double denom = static_cast<double>(n - cdf_min);
  for (int v = 0; v < 256; ++v) {
    if (hist[v] == 0) continue;
    lut[v] = round_to_u8(static_cast<double>(cdf[v] - cdf_min) / denom * 255.0);
  }

  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lut[in[i]];
  return RasterImage(img.width(), img.height(), ColorSpace::Gray, std::move(out), img.ppi());
}

RasterImage negate(const RasterImage& img) {
  if (img.space() != ColorSpace::Gray)
    raise(Errc::InvalidSpace, "negate expects a grayscale image");
  std::vector<std::uint8_t> out(img.samples().size());
  const auto& in = img.samples();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 255 - in[i];
  return RasterImage(img.width(), img.height(), ColorSpace::Gray, std::move(out), img.ppi());
}

RasterImage rgb_to_hsv(const RasterImage& img) {
  if (img.space() != ColorSpace::Rgb)
    raise(Errc::InvalidSpace, "rgb_to_hsv expects an RGB image");
  std::vector<std::uint8_t> out(img.samples().size());
  const auto& in = img.samples();
  for (std::size_t i = 0, n = out.size() / 3; i < n; ++i) {
    const double r = in[i * 3 + 0];
    const double g = in[i * 3 + 1];
    const double b = in[i * 3 + 2];
    const double maxc = std::max({r, g, b});
    const double minc = std::min({r, g, b});
    const double delta = maxc - minc;

    double h_deg = 0.0;
    if (delta > 0.0) {
      if (maxc == r)
        h_deg = 60.0 * (g - b) / delta;
      else if (maxc == g)
        h_deg = 60.0 * (2.0 + (b - r) / delta);
      else
        h_deg = 60.0 * (4.0 + (r - g) / delta);
      if (h_deg < 0.0) h_deg += 360.0;
    }
    const double s = maxc > 0.0 ? delta / maxc : 0.0;

    out[i * 3 + 0] = round_to_u8(h_deg / 360.0 * 255.0);
    out[i * 3 + 1] = round_to_u8(s * 255.0);
    out[i * 3 + 2] = static_cast<std::uint8_t>(maxc);
  }
  return RasterImage(img.width(), img.height(), ColorSpace::Hsv, std::move(out), img.ppi());
}

}  // namespace fpad
