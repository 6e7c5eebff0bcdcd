#include "atlaspaint/colormap.hpp"

#include <algorithm>
#include <cmath>

#include "atlaspaint/error.hpp"

namespace atlaspaint {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double c) {
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

std::uint8_t linear_to_srgb8(double linear) {
  if (!(linear > 0.0)) return 0;
  if (linear >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(std::clamp(linear_to_srgb(linear), 0.0, 1.0) * 255.0));
}

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Rgb parse_hex_color(std::string_view text) {
  auto bad = [&] { return Error(ErrorCode::BadColor, "invalid color '" + std::string(text) + "', expected #RRGGBB"); };
  if (text.size() != 7 || text[0] != '#') throw bad();
  double channels[3];
  for (int i = 0; i < 3; ++i) {
    const int hi = hex_digit(text[1 + 2 * i]);
    const int lo = hex_digit(text[2 + 2 * i]);
    if (hi < 0 || lo < 0) throw bad();
    channels[i] = srgb_to_linear((hi * 16 + lo) / 255.0);
  }
  return {channels[0], channels[1], channels[2]};
}

std::string to_hex_color(const Rgb& c) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out = "#";
  for (double ch : {c.r, c.g, c.b}) {
    const std::uint8_t byte = linear_to_srgb8(ch);
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xF]);
  }
  return out;
}

ColorGradient::ColorGradient(std::vector<Rgb> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.size() < 2) throw Error(ErrorCode::InvalidArgument, "a gradient needs at least 2 anchor colors");
  for (const Rgb& c : anchors_) {
    for (double ch : {c.r, c.g, c.b}) {
      if (!(ch >= 0.0 && ch <= 1.0)) throw Error(ErrorCode::BadColor, "anchor channel outside [0, 1]");
    }
  }
}

ColorGradient ColorGradient::from_hex(const std::vector<std::string>& hex) {
  std::vector<Rgb> anchors;
  anchors.reserve(hex.size());
  for (const std::string& h : hex) anchors.push_back(parse_hex_color(h));
  return ColorGradient(std::move(anchors));
}

ColorGradient ColorGradient::default_gradient() { return from_hex(kDefaultGradientHex); }

Rgb value_to_color(double v, const ColorGradient& gradient) {
  const int K = gradient.K();
  if (!(v >= 0.0 && v <= K)) {
    throw Error(ErrorCode::OutOfRange, "value " + std::to_string(v) + " outside [0, " + std::to_string(K) + "]");
  }
  const int i = std::min(static_cast<int>(std::floor(v)), K - 1);
  const double f = v - i;
  const Rgb& a = gradient.anchors()[i];
  const Rgb& b = gradient.anchors()[i + 1];
  if (f == 0.0) return a;
  if (f == 1.0) return b;
  // a + f (b - a), clamped to the segment so outputs stay monotone across anchors.
  auto blend = [f](double x, double y) { return std::clamp(x + f * (y - x), std::min(x, y), std::max(x, y)); };
  return {blend(a.r, b.r), blend(a.g, b.g), blend(a.b, b.b)};
}

}  // namespace atlaspaint
