#pragma once

#include <array>
#include <cmath>
#include <limits>

namespace atlaspaint {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }

// Unit vector along v, or `fallback` when v has zero length.
inline Vec3 normalized(const Vec3& v, const Vec3& fallback = {0.0, 0.0, 1.0}) {
  const double len = length(v);
  if (!(len > 0.0)) return fallback;
  return {v.x / len, v.y / len, v.z / len};
}

// 3x4 affine transform, row-major: p' = A p + b with A = m[r*4 + c] (c < 3)
// and b = m[r*4 + 3].
struct Affine3 {
  std::array<double, 12> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};

  static Affine3 identity() { return {}; }
  static Affine3 scale(double s);
  static Affine3 rotation_z(double radians);
  static Affine3 translation(const Vec3& t);

  double linear(int r, int c) const { return m[r * 4 + c]; }
  Vec3 offset() const { return {m[3], m[7], m[11]}; }

  Vec3 apply_point(const Vec3& p) const;
  Vec3 apply_vector(const Vec3& v) const;
  double determinant() const;
  bool is_identity() const;

  // Throws Error(SingularTransform) when |det A| <= 1e-9.
  Affine3 inverse() const;

  bool operator==(const Affine3&) const = default;
};

// (a then b): result(p) = b(a(p)).
Affine3 compose(const Affine3& a, const Affine3& b);

inline constexpr double kSingularDeterminant = 1e-9;

struct Bounds3 {
  Vec3 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
  Vec3 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};

  bool empty() const { return !(min.x <= max.x && min.y <= max.y && min.z <= max.z); }
  void extend(const Vec3& p);
  void extend(const Bounds3& b);
  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 size() const { return max - min; }
};

}  // namespace atlaspaint
