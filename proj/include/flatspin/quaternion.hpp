#pragma once

#include <array>
#include <cmath>

namespace flatspin {

/// Real quaternion w + x I + y J + z K with I^2 = J^2 = K^2 = -1, IJ = K.
struct Quat {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static constexpr Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }

  constexpr Quat conj() const { return {w, -x, -y, -z}; }
  constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  Quat normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }
  Quat inverse() const {
    const double n2 = norm2();
    return {w / n2, -x / n2, -y / n2, -z / n2};
  }

  constexpr double operator[](int i) const { return i == 0 ? w : i == 1 ? x : i == 2 ? y : z; }
  constexpr std::array<double, 4> array() const { return {w, x, y, z}; }

  constexpr Quat operator-() const { return {-w, -x, -y, -z}; }
  friend constexpr Quat operator+(Quat a, Quat b) { return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Quat operator-(Quat a, Quat b) { return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Quat operator*(double k, Quat a) { return {k * a.w, k * a.x, k * a.y, k * a.z}; }
  friend constexpr Quat operator*(Quat a, double k) { return k * a; }
  friend constexpr Quat operator*(Quat a, Quat b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend constexpr bool operator==(Quat a, Quat b) = default;
};

inline constexpr Quat kQI{0.0, 1.0, 0.0, 0.0};
inline constexpr Quat kQJ{0.0, 0.0, 1.0, 0.0};
inline constexpr Quat kQK{0.0, 0.0, 0.0, 1.0};

inline double dot(Quat a, Quat b) { return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z; }
inline double distance(Quat a, Quat b) { return (a - b).norm(); }

/// exp of a pure imaginary quaternion v: cos|v| + sin|v| v/|v|.
inline Quat exp_imag(double x, double y, double z) {
  const double th = std::sqrt(x * x + y * y + z * z);
  if (th < 1e-300) return Quat::identity();
  const double k = std::sin(th) / th;
  return {std::cos(th), k * x, k * y, k * z};
}

/// Principal logarithm of a unit quaternion; imaginary part returned, angle in [0, pi].
inline Quat log_unit(Quat q) {
  const double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
  if (vn < 1e-300) return {};
  const double th = std::atan2(vn, q.w);
  const double k = th / vn;
  return {0.0, k * q.x, k * q.y, k * q.z};
}

}  // namespace flatspin
