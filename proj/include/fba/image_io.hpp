#pragma once

#include <stdexcept>
#include <string>

#include "fba/image.hpp"

namespace fba {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reads an 8/16-bit PNG (gray or RGB, alpha stripped, palette expanded) or a
// 32-bit float PFM. Sample values are mapped linearly to [0,1]; no gamma
// decoding is applied.
PlanarImage read_image(const std::string& path);

// Writes by extension: .png quantized to 8 or 16 bits with clamping to
// [0,1], .pfm as raw float32 without clamping.
void write_image(const PlanarImage& img, const std::string& path, int png_bits = 8);

}  // namespace fba
