#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpad/error.hpp"

namespace fpad {

enum class ColorSpace { Rgb, Hsv, Gray };

const char* to_string(ColorSpace space);
int channel_count(ColorSpace space);

/// Rounds to the nearest integer (ties away from zero upward) and saturates to [0,255].
std::uint8_t round_to_u8(double v);

// 8-bit raster, row-major, channel-interleaved. The currency of every
// pipeline stage: raw captures, enhanced prints, HSV conversions.
class RasterImage {
 public:
  RasterImage(int width, int height, ColorSpace space, std::vector<std::uint8_t> samples,
              std::optional<double> ppi = std::nullopt);

  static RasterImage filled(int width, int height, ColorSpace space, std::uint8_t value,
                            std::optional<double> ppi = std::nullopt);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  ColorSpace space() const { return space_; }
  std::optional<double> ppi() const { return ppi_; }
  void set_ppi(std::optional<double> ppi);

  std::uint8_t at(int x, int y, int c = 0) const {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  const std::vector<std::uint8_t>& samples() const { return samples_; }
  std::vector<std::uint8_t>& samples() { return samples_; }

 private:
  int width_;
  int height_;
  int channels_;
  ColorSpace space_;
  std::optional<double> ppi_;
  std::vector<std::uint8_t> samples_;
};

// Read-only view of one channel plane of a RasterImage.
class ChannelView {
 public:
  ChannelView(const RasterImage& img, int channel);
  explicit ChannelView(const RasterImage& img);  // requires a single-channel image

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint8_t at(int x, int y) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * stride_ + offset_];
  }

 private:
  const std::uint8_t* data_;
  int width_;
  int height_;
  int stride_;
  int offset_;
};

/// Luma conversion: gray = round(0.299 R + 0.587 G + 0.114 B).
RasterImage to_grayscale(const RasterImage& img);

/// Global histogram equalization with the cumulative-histogram remap
/// h(v) = round((cdf(v) - cdf_min) / (N - cdf_min) * 255). A single-valued
/// image is returned unchanged.
RasterImage equalize_histogram(const RasterImage& img);

/// Intensity inversion v -> 255 - v.
RasterImage negate(const RasterImage& img);

/// Hexcone RGB -> HSV. H is scaled from [0, 360) degrees to [0, 255];
/// S and V to [0, 255]. Achromatic pixels get H = 0.
RasterImage rgb_to_hsv(const RasterImage& img);

}  // namespace fpad
