#pragma once

#include <cstdint>
#include <vector>

#include "atlaspaint/colormap.hpp"
#include "atlaspaint/renderer.hpp"

namespace atlaspaint {

// 8-bit sRGB-encoded RGBA raster, rows top-down.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  Image() = default;
  Image(int w, int h, std::array<std::uint8_t, 4> fill = {255, 255, 255, 255});

  std::uint8_t* pixel(int x, int y) { return &rgba[(static_cast<std::size_t>(y) * width + x) * 4]; }
  const std::uint8_t* pixel(int x, int y) const { return &rgba[(static_cast<std::size_t>(y) * width + x) * 4]; }
  std::array<std::uint8_t, 4> at(int x, int y) const {
    const std::uint8_t* p = pixel(x, y);
    return {p[0], p[1], p[2], p[3]};
  }

  bool operator==(const Image&) const = default;
};

std::array<std::uint8_t, 4> encode_srgb8(const Rgba& linear);

// Linear framebuffer -> sRGB bytes.
Image to_image(const Framebuffer& fb);

// Copies `src` into `dst` with its top-left corner at (x, y); clipped to dst.
void blit(const Image& src, Image& dst, int x, int y);

Image mirror_horizontal(const Image& image);

}  // namespace atlaspaint
