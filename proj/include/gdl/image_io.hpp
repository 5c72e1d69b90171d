#pragma once

#include <string>

#include "gdl/tensor.hpp"

namespace gdl {

/// Load a binary PGM (P5, maxval 255) and scale bytes by 1/255 into [0,1].
/// Color (P6), ASCII (P2), and 16-bit files are rejected.
Image load_pgm(const std::string& path);

/// Write a binary PGM, clamping to [0,1] and rounding to 8 bits. The
/// load -> save -> load round trip is lossless.
void save_pgm(const Image& img, const std::string& path);

}  // namespace gdl
