// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "ptv/image.hpp"

namespace ptv {

// Lossless raster I/O. Images are stored as 8-bit PNG; values round-trip
// through the [0,1] -> {0..255} quantization.
Image read_image(const std::string& path);
void write_image(const std::string& path, const Image& img);

// Label masks as single-channel 8-bit PNG, one label id per pixel.
SegMask read_mask(const std::string& path);
void write_mask(const std::string& path, const SegMask& mask);

}  // namespace ptv
