#pragma once

#include <string>

#include "fpsim/core/types.hpp"

namespace fpsim::codec {

// 8 bpp images as binary PGM (P5, maxval 255).
void write_pgm(const core::RawFingerprintImage& img, const std::string& path);
core::RawFingerprintImage read_pgm(const std::string& path);

// 16 bpp images as headerless little-endian u16, row-major; the caller owns
// the dimensions (dictionary manifests record them).
void write_raw16(const core::RawFingerprintImage& img, const std::string& path);
core::RawFingerprintImage read_raw16(const std::string& path, int width,
                                     int height);

}  // namespace fpsim::codec
