#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace atlaspaint {

// Linear-light RGB, channels nominally in [0, 1].
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  bool operator==(const Rgb&) const = default;
};

double srgb_to_linear(double encoded);
double linear_to_srgb(double linear);
// Linear channel -> 8-bit sRGB byte, clamped and rounded to nearest.
std::uint8_t linear_to_srgb8(double linear);

// Parses `#RRGGBB` (sRGB) into linear RGB. Throws Error(BadColor).
Rgb parse_hex_color(std::string_view text);
// Inverse of parse_hex_color up to 8-bit quantization.
std::string to_hex_color(const Rgb& linear);

// K + 1 anchor colors; a value v in [0, K] blends anchors floor(v) and floor(v)+1.
class ColorGradient {
 public:
  explicit ColorGradient(std::vector<Rgb> anchors);

  static ColorGradient from_hex(const std::vector<std::string>& hex);
  // Light grey baseline, then yellow -> orange -> red (K = 3).
  static ColorGradient default_gradient();

  int K() const { return static_cast<int>(anchors_.size()) - 1; }
  const std::vector<Rgb>& anchors() const { return anchors_; }

 private:
  std::vector<Rgb> anchors_;
};

inline const std::vector<std::string> kDefaultGradientHex = {"#CCCCCC", "#FFF500", "#FF7800", "#FF0000"};

// Throws Error(OutOfRange) when v is outside [0, K] or NaN.
Rgb value_to_color(double v, const ColorGradient& gradient);

}  // namespace atlaspaint
