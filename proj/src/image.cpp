#include "atlaspaint/image.hpp"

#include <algorithm>
#include <cmath>

#include "atlaspaint/error.hpp"

namespace atlaspaint {

Image::Image(int w, int h, std::array<std::uint8_t, 4> fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw Error(ErrorCode::InvalidArgument, "negative image size");
  rgba.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 4);
  for (std::size_t i = 0; i < rgba.size(); i += 4) std::copy(fill.begin(), fill.end(), rgba.begin() + i);
}

std::array<std::uint8_t, 4> encode_srgb8(const Rgba& c) {
  const double a = std::clamp(static_cast<double>(c.a), 0.0, 1.0);
  return {linear_to_srgb8(c.r), linear_to_srgb8(c.g), linear_to_srgb8(c.b),
          static_cast<std::uint8_t>(std::lround(a * 255.0))};
}

Image to_image(const Framebuffer& fb) {
  Image image(fb.width(), fb.height());
  std::size_t i = 0;
  for (const Rgba& c : fb.pixels()) {
    const auto bytes = encode_srgb8(c);
    std::copy(bytes.begin(), bytes.end(), image.rgba.begin() + i);
    i += 4;
  }
  return image;
}

void blit(const Image& src, Image& dst, int x, int y) {
  const int x0 = std::max(0, x);
  const int y0 = std::max(0, y);
  const int x1 = std::min(dst.width, x + src.width);
  const int y1 = std::min(dst.height, y + src.height);
  if (x0 >= x1) return;
  for (int row = y0; row < y1; ++row) {
    const std::uint8_t* from = src.pixel(x0 - x, row - y);
    std::copy(from, from + static_cast<std::size_t>(x1 - x0) * 4, dst.pixel(x0, row));
  }
}

Image mirror_horizontal(const Image& image) {
  Image out(image.width, image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::uint8_t* p = image.pixel(image.width - 1 - x, y);
      std::copy(p, p + 4, out.pixel(x, y));
    }
  }
  return out;
}

}  // namespace atlaspaint
