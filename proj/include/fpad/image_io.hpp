#pragma once

#include <filesystem>

#include "fpad/raster.hpp"

namespace fpad {

// 8-bit image I/O. PNG (1- and 3-channel, pHYs resolution chunk honored),
// binary PGM (P5) and PPM (P6). 3-channel files load tagged RGB.
RasterImage load_image(const std::filesystem::path& path);
void save_image(const RasterImage& img, const std::filesystem::path& path);

RasterImage load_png(const std::filesystem::path& path);
void save_png(const RasterImage& img, const std::filesystem::path& path);

RasterImage load_pnm(const std::filesystem::path& path);
void save_pnm(const RasterImage& img, const std::filesystem::path& path);

}  // namespace fpad
