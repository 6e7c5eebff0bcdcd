#pragma once

#include <filesystem>
#include <string>

#include "atlaspaint/image.hpp"

namespace atlaspaint {

// 8-bit RGBA, non-interlaced, one IDAT chunk, plus an sRGB chunk. The output
// is a pure function of the pixels.
std::string encode_png(const Image& image);

// Framebuffer -> sRGB bytes -> PNG file. Throws Error(IoError).
void encode_png(const Framebuffer& fb, const std::filesystem::path& path);
void write_png(const Image& image, const std::filesystem::path& path);

}  // namespace atlaspaint
