#include "atlaspaint/geometry.hpp"

#include <algorithm>

#include "atlaspaint/error.hpp"

namespace atlaspaint {

Affine3 Affine3::scale(double s) {
  Affine3 t;
  t.m = {s, 0, 0, 0, 0, s, 0, 0, 0, 0, s, 0};
  return t;
}

Affine3 Affine3::rotation_z(double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  Affine3 t;
  t.m = {c, -s, 0, 0, s, c, 0, 0, 0, 0, 1, 0};
  return t;
}

Affine3 Affine3::translation(const Vec3& v) {
  Affine3 t;
  t.m[3] = v.x;
  t.m[7] = v.y;
  t.m[11] = v.z;
  return t;
}

Vec3 Affine3::apply_point(const Vec3& p) const {
  return {m[0] * p.x + m[1] * p.y + m[2] * p.z + m[3],
          m[4] * p.x + m[5] * p.y + m[6] * p.z + m[7],
          m[8] * p.x + m[9] * p.y + m[10] * p.z + m[11]};
}

Vec3 Affine3::apply_vector(const Vec3& v) const {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
          m[4] * v.x + m[5] * v.y + m[6] * v.z,
          m[8] * v.x + m[9] * v.y + m[10] * v.z};
}

double Affine3::determinant() const {
  return m[0] * (m[5] * m[10] - m[6] * m[9]) - m[1] * (m[4] * m[10] - m[6] * m[8]) +
         m[2] * (m[4] * m[9] - m[5] * m[8]);
}

bool Affine3::is_identity() const { return *this == Affine3::identity(); }

Affine3 Affine3::inverse() const {
  const double det = determinant();
  if (!(std::abs(det) > kSingularDeterminant)) {
    throw Error(ErrorCode::SingularTransform,
                "transform is singular (|det| = " + std::to_string(std::abs(det)) + ")");
  }
  const double inv_det = 1.0 / det;
  std::array<double, 9> a{};
  a[0] = (m[5] * m[10] - m[6] * m[9]) * inv_det;
  a[1] = (m[2] * m[9] - m[1] * m[10]) * inv_det;
  a[2] = (m[1] * m[6] - m[2] * m[5]) * inv_det;
  a[3] = (m[6] * m[8] - m[4] * m[10]) * inv_det;
  a[4] = (m[0] * m[10] - m[2] * m[8]) * inv_det;
  a[5] = (m[2] * m[4] - m[0] * m[6]) * inv_det;
  a[6] = (m[4] * m[9] - m[5] * m[8]) * inv_det;
  a[7] = (m[1] * m[8] - m[0] * m[9]) * inv_det;
  a[8] = (m[0] * m[5] - m[1] * m[4]) * inv_det;
  const Vec3 b = offset();
  Affine3 r;
  for (int row = 0; row < 3; ++row) {
    r.m[row * 4 + 0] = a[row * 3 + 0];
    r.m[row * 4 + 1] = a[row * 3 + 1];
    r.m[row * 4 + 2] = a[row * 3 + 2];
    r.m[row * 4 + 3] = -(a[row * 3 + 0] * b.x + a[row * 3 + 1] * b.y + a[row * 3 + 2] * b.z);
  }
  return r;
}

Affine3 compose(const Affine3& a, const Affine3& b) {
  Affine3 r;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 4; ++col) {
      double v = b.m[row * 4 + 0] * a.m[0 * 4 + col] + b.m[row * 4 + 1] * a.m[1 * 4 + col] +
                 b.m[row * 4 + 2] * a.m[2 * 4 + col];
      if (col == 3) v += b.m[row * 4 + 3];
      r.m[row * 4 + col] = v;
    }
  }
  return r;
}

void Bounds3::extend(const Vec3& p) {
  min = {std::min(min.x, p.x), std::min(min.y, p.y), std::min(min.z, p.z)};
  max = {std::max(max.x, p.x), std::max(max.y, p.y), std::max(max.z, p.z)};
}

void Bounds3::extend(const Bounds3& b) {
  if (b.empty()) return;
  extend(b.min);
  extend(b.max);
}

}  // namespace atlaspaint
