#pragma once

#include <array>
#include <optional>
#include <utility>

#include "flatspin/lorentz.hpp"
#include "flatspin/quaternion.hpp"

namespace flatspin {

/// Quaternion with Lorentz coefficients: a0 + a1 I + a2 J + a3 K.
///
/// Via the idempotents (1 +- sigma)/2 this algebra is isomorphic to H (+) H; split()
/// returns the pair (xi_+, xi_-) and multiplication is componentwise there.
struct SplitQuat {
  std::array<Lorentz, 4> a{};

  constexpr SplitQuat() = default;
  constexpr SplitQuat(Lorentz a0, Lorentz a1, Lorentz a2, Lorentz a3) : a{a0, a1, a2, a3} {}
  constexpr SplitQuat(Lorentz scalar) : a{scalar, 0.0, 0.0, 0.0} {}  // NOLINT(google-explicit-constructor)

  static SplitQuat from_real(Quat q) { return {q.w, q.x, q.y, q.z}; }
  /// Inverse of split(): (1 + sigma)/2 plus + (1 - sigma)/2 minus.
  static SplitQuat from_split(Quat plus, Quat minus);

  constexpr Lorentz operator[](int i) const { return a[static_cast<std::size_t>(i)]; }
  constexpr Lorentz& operator[](int i) { return a[static_cast<std::size_t>(i)]; }

  /// Quaternionic conjugation (anti-automorphism).
  constexpr SplitQuat bar() const { return {a[0], -a[1], -a[2], -a[3]}; }
  /// Lorentz conjugation of every coefficient (automorphism).
  constexpr SplitQuat hat() const { return {a[0].conj(), a[1].conj(), a[2].conj(), a[3].conj()}; }

  std::pair<Quat, Quat> split() const;

  constexpr Lorentz scalar() const { return a[0]; }
  constexpr SplitQuat imag() const { return {0.0, a[1], a[2], a[3]}; }

  constexpr SplitQuat operator-() const { return {-a[0], -a[1], -a[2], -a[3]}; }
  friend constexpr SplitQuat operator+(const SplitQuat& x, const SplitQuat& y) {
    return {x.a[0] + y.a[0], x.a[1] + y.a[1], x.a[2] + y.a[2], x.a[3] + y.a[3]};
  }
  friend constexpr SplitQuat operator-(const SplitQuat& x, const SplitQuat& y) {
    return {x.a[0] - y.a[0], x.a[1] - y.a[1], x.a[2] - y.a[2], x.a[3] - y.a[3]};
  }
  friend constexpr SplitQuat operator*(Lorentz k, const SplitQuat& x) {
    return {k * x.a[0], k * x.a[1], k * x.a[2], k * x.a[3]};
  }
  friend constexpr SplitQuat operator*(const SplitQuat& x, Lorentz k) { return k * x; }
  friend constexpr SplitQuat operator*(const SplitQuat& x, const SplitQuat& y) {
    const auto& p = x.a;
    const auto& q = y.a;
    return {p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
            p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
            p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
            p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]};
  }
  friend constexpr bool operator==(const SplitQuat& x, const SplitQuat& y) { return x.a == y.a; }
};

inline constexpr SplitQuat kOne{1.0, 0.0, 0.0, 0.0};
inline constexpr SplitQuat kI{0.0, 1.0, 0.0, 0.0};
inline constexpr SplitQuat kJ{0.0, 0.0, 1.0, 0.0};
inline constexpr SplitQuat kK{0.0, 0.0, 0.0, 1.0};

/// Lorentz-valued symmetric form sum a_i a'_i.
constexpr Lorentz H(const SplitQuat& x, const SplitQuat& y) {
  return x.a[0] * y.a[0] + x.a[1] * y.a[1] + x.a[2] * y.a[2] + x.a[3] * y.a[3];
}

/// <<x, y>> = bar(y) x.
inline SplitQuat bracket(const SplitQuat& x, const SplitQuat& y) { return y.bar() * x; }

double max_abs(const SplitQuat& x);
inline double distance(const SplitQuat& x, const SplitQuat& y) { return max_abs(x - y); }
inline bool approx_equal(const SplitQuat& x, const SplitQuat& y, double tol = 1e-12) {
  return distance(x, y) <= tol;
}

/// Invertible iff H(x, x) is invertible in the Lorentz numbers.
bool is_invertible(const SplitQuat& x);
/// sigma x = +x (x in H_+) or sigma x = -x (x in H_-), with the same relative threshold.
bool in_idempotent_halves(const SplitQuat& x);
/// bar(x) / H(x, x); NotInvertible when x lies in H_+ or H_-.
SplitQuat inverse(const SplitQuat& x);

/// Point of R^4, embedded as sigma x0 + x1 I + x2 J + x3 K.
struct Vec4 {
  std::array<double, 4> x{};

  constexpr double operator[](int i) const { return x[static_cast<std::size_t>(i)]; }
  constexpr double& operator[](int i) { return x[static_cast<std::size_t>(i)]; }

  constexpr SplitQuat embed() const { return {Lorentz{0.0, x[0]}, x[1], x[2], x[3]}; }
  /// Reads the R^4 coordinates of an element satisfying hat(bar(xi)) = -xi.
  static constexpr Vec4 from_embedded(const SplitQuat& q) { return {{q.a[0].v, q.a[1].u, q.a[2].u, q.a[3].u}}; }

  /// The identification R^4 = H, sigma q0 + q1 I + q2 J + q3 K <-> q.
  constexpr Quat as_quat() const { return {x[0], x[1], x[2], x[3]}; }
  static constexpr Vec4 from_quat(Quat q) { return {{q.w, q.x, q.y, q.z}}; }

  friend constexpr Vec4 operator+(Vec4 a, Vec4 b) {
    return {{a.x[0] + b.x[0], a.x[1] + b.x[1], a.x[2] + b.x[2], a.x[3] + b.x[3]}};
  }
  friend constexpr Vec4 operator-(Vec4 a, Vec4 b) {
    return {{a.x[0] - b.x[0], a.x[1] - b.x[1], a.x[2] - b.x[2], a.x[3] - b.x[3]}};
  }
  friend constexpr Vec4 operator*(double k, Vec4 a) { return {{k * a.x[0], k * a.x[1], k * a.x[2], k * a.x[3]}}; }
  friend constexpr bool operator==(Vec4 a, Vec4 b) = default;
};

inline double dot(const Vec4& a, const Vec4& b) {
  return a.x[0] * b.x[0] + a.x[1] * b.x[1] + a.x[2] * b.x[2] + a.x[3] * b.x[3];
}
inline double norm(const Vec4& a) { return std::sqrt(dot(a, a)); }

/// Residual of the membership condition hat(bar(xi)) = -xi.
double r4_membership_residual(const SplitQuat& xi);

/// Unit element of Spin(4) = {q : H(q, q) = 1}.
class Spinor {
 public:
  static constexpr double kUnitTol = 1e-9;

  Spinor() : q_(kOne) {}
  /// Throws NotUnit if |H(q, q) - 1| > kUnitTol.
  explicit Spinor(const SplitQuat& q);

  static Spinor from_pair(Quat plus, Quat minus);

  const SplitQuat& value() const { return q_; }
  /// Unit quaternion pair (g_+, g_-).
  std::pair<Quat, Quat> pair() const { return q_.split(); }
  Spinor inverse() const { return Spinor(q_.bar(), 0); }

  friend Spinor operator*(const Spinor& a, const Spinor& b) { return Spinor(a.q_ * b.q_, 0); }

 private:
  Spinor(const SplitQuat& q, int) : q_(q) {}
  SplitQuat q_;
};

/// cos(theta) + sin(theta) I, theta Lorentz.
Spinor circle_element(Lorentz theta);

/// x -> q x hat(q)^-1 on R^4.
Vec4 rotate_r4(const Spinor& q, const Vec4& x);
/// Same map, for a raw split quaternion (checked for NotUnit).
Vec4 rotate_r4(const SplitQuat& q, const Vec4& x);

/// a I + b J + c K in Lambda^2 R^4 = A I + A J + A K.
struct Bivector {
  Lorentz a;
  Lorentz b;
  Lorentz c;

  constexpr SplitQuat as_quat() const { return {0.0, a, b, c}; }
  static constexpr Bivector from_quat(const SplitQuat& q) { return {q.a[1], q.a[2], q.a[3]}; }
};

/// g^-1 I g, the Hopf-type projection Spin(4) -> S^2_A.
Bivector hopf(const Spinor& g);
Bivector hopf(const SplitQuat& g);

/// xi x xi' = (xi xi' - xi' xi)/2 for imaginary arguments.
SplitQuat cross(const SplitQuat& x, const SplitQuat& y);
/// [xi, xi', xi''] = H(xi x xi', xi'').
Lorentz mixed(const SplitQuat& x, const SplitQuat& y, const SplitQuat& z);
/// For xi invertible and xi x xi' = 0, the Lorentz factor with xi' = lambda xi.
std::optional<Lorentz> collinear_factor(const SplitQuat& xi, const SplitQuat& xi_prime, double tol = 1e-12);

/// Bivector of the oriented plane spanned by orthonormal v2, v3 in R^4 (v2 hat(v3)).
SplitQuat plane_bivector(const Vec4& v2, const Vec4& v3);

}  // namespace flatspin
