#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "atlaspaint/image.hpp"

namespace atlaspaint {

using Rgb8 = std::array<std::uint8_t, 3>;

// Median-cut over the color histogram of every frame (alpha ignored). When the
// frames use at most `max_colors` distinct colors the palette is exact.
std::vector<Rgb8> median_cut_palette(std::span<const Image> frames, std::size_t max_colors = 256);

// Nearest palette index per pixel (squared RGB distance, lowest index on
// ties). With `dither`, a 4x4 Bayer threshold is added before the lookup.
std::vector<std::uint8_t> quantize(const Image& frame, std::span<const Rgb8> palette, bool dither = false);

struct GifOptions {
  std::uint16_t delay_cs = 50;
  std::uint16_t loop_count = 0;  // 0 = loop forever
  bool dither = false;
};

// GIF89a: one global palette, NETSCAPE2.0 loop extension, a graphic control
// extension with `delay_cs` before every frame. All frames share one size.
std::string encode_gif(std::span<const Image> frames, const GifOptions& options = {});

// Variable-width LZW as used by GIF image data (codes packed LSB-first,
// not yet split into sub-blocks).
std::string lzw_encode(std::span<const std::uint8_t> indices, int min_code_size);

}  // namespace atlaspaint
