#pragma once

#include <cmath>
#include <vector>

namespace flatspin {

/// Lorentz (split-complex) number u + sigma v with sigma^2 = 1.
///
/// Stored in the (u, v) basis. The split coordinates s = u + v and t = u - v are
/// the coefficients along the idempotents (1 + sigma)/2 and (1 - sigma)/2; in
/// that basis multiplication and every analytic function act componentwise.
struct Lorentz {
  double u = 0.0;
  double v = 0.0;

  constexpr Lorentz() = default;
  constexpr Lorentz(double real) : u(real) {}  // NOLINT(google-explicit-constructor)
  constexpr Lorentz(double real, double sigma_part) : u(real), v(sigma_part) {}

  static constexpr Lorentz from_split(double s, double t) { return {0.5 * (s + t), 0.5 * (s - t)}; }

  constexpr double s() const { return u + v; }
  constexpr double t() const { return u - v; }

  constexpr Lorentz conj() const { return {u, -v}; }

  constexpr Lorentz operator-() const { return {-u, -v}; }
  constexpr Lorentz& operator+=(Lorentz o) {
    u += o.u;
    v += o.v;
    return *this;
  }
  constexpr Lorentz& operator-=(Lorentz o) {
    u -= o.u;
    v -= o.v;
    return *this;
  }
  constexpr Lorentz& operator*=(Lorentz o) {
    *this = Lorentz{u * o.u + v * o.v, u * o.v + v * o.u};
    return *this;
  }

  friend constexpr Lorentz operator+(Lorentz a, Lorentz b) { return a += b; }
  friend constexpr Lorentz operator-(Lorentz a, Lorentz b) { return a -= b; }
  friend constexpr Lorentz operator*(Lorentz a, Lorentz b) { return a *= b; }
  friend constexpr bool operator==(Lorentz a, Lorentz b) { return a.u == b.u && a.v == b.v; }
};

inline constexpr Lorentz kSigma{0.0, 1.0};

/// Split coordinates (s, t) of a Lorentz number.
struct SplitPair {
  double s = 0.0;
  double t = 0.0;
};

constexpr SplitPair split(Lorentz a) { return {a.s(), a.t()}; }
constexpr Lorentz unsplit(SplitPair p) { return Lorentz::from_split(p.s, p.t); }

/// Relative threshold below which a split coordinate counts as zero.
inline constexpr double kSingularRelTol = 1e-14;

/// a is invertible iff neither split coordinate vanishes, i.e. a is off the lines (1 +- sigma)R.
bool is_invertible(Lorentz a);

/// Throws NotInvertible when u = +-v.
Lorentz inverse(Lorentz a);

inline Lorentz operator/(Lorentz a, Lorentz b) { return a * inverse(b); }

/// All square roots of b, principal root (both split coordinates >= 0) first.
///
/// Interior of the cone {u >= 0, |v| <= u}: four roots ordered (+,+), (-,-), (+,-), (-,+)
/// in split signs. Boundary (exactly one split coordinate zero): two roots. b = 0: the single
/// root 0. Outside the closed cone: NotInCone.
std::vector<Lorentz> sqrt_all(Lorentz b);

Lorentz principal_sqrt(Lorentz b);

struct LorentzTrig {
  Lorentz cos;
  Lorentz sin;
};

LorentzTrig trig(Lorentz theta);

inline double abs_max(Lorentz a) { return std::fmax(std::fabs(a.u), std::fabs(a.v)); }

inline bool approx_equal(Lorentz a, Lorentz b, double tol = 1e-12) { return abs_max(a - b) <= tol; }

}  // namespace flatspin
