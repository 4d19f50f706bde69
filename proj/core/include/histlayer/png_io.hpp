#pragma once

#include <filesystem>

#include "histlayer/colorspace.hpp"

namespace histlayer {

// Any PNG color type and bit depth is decoded to 8-bit RGB; alpha is dropped
// and gray is replicated. Throws IoError if the file cannot be read or decoded.
ImageRGB8 read_png(const std::filesystem::path& path);

// 8-bit RGB, no alpha, no timestamp chunk, so identical images give
// identical files. Throws IoError on failure.
void write_png(const std::filesystem::path& path, const ImageRGB8& image);

}  // namespace histlayer
