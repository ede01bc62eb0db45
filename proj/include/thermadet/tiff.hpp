#pragma once

#include "thermadet/types.hpp"

#include <filesystem>

namespace thermadet::io {

// Minimal uncompressed 16-bit grayscale TIFF, little-endian, single strip.
// Enough for the frame store; not a general TIFF implementation.
void write_tiff16(const std::filesystem::path& path, const Image16& img);
Image16 read_tiff16(const std::filesystem::path& path);

}  // namespace thermadet::io
