#include <algorithm>
#include <cmath>

#include "flatspin/error.hpp"
#include "flatspin/lorentz.hpp"
#include "flatspin/splitquat.hpp"

namespace flatspin {

const char* error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NotInCone: return "NotInCone";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::DegeneratePoint: return "DegeneratePoint";
    case ErrorCode::NotImmersed: return "NotImmersed";
    case ErrorCode::SignLoss: return "SignLoss";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DegenerateTangent: return "DegenerateTangent";
    case ErrorCode::LatticeParity: return "LatticeParity";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::NoAdmissibleAlpha: return "NoAdmissibleAlpha";
    case ErrorCode::InvalidLattice: return "InvalidLattice";
    case ErrorCode::OrientationReversed: return "OrientationReversed";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::AtPole: return "AtPole";
    case ErrorCode::ProjectionRequired: return "ProjectionRequired";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Lorentz numbers

namespace {

bool split_is_zero(double c, double scale) { return std::fabs(c) <= kSingularRelTol * scale; }

}  // namespace

bool is_invertible(Lorentz a) {
  const double s = a.s();
  const double t = a.t();
  const double scale = std::fmax(std::fabs(s), std::fabs(t));
  if (scale == 0.0) return false;
  return !split_is_zero(s, scale) && !split_is_zero(t, scale);
}

Lorentz inverse(Lorentz a) {
  if (!is_invertible(a)) throw Error(ErrorCode::NotInvertible, "Lorentz number on the light cone u = +-v");
  return Lorentz::from_split(1.0 / a.s(), 1.0 / a.t());
}

std::vector<Lorentz> sqrt_all(Lorentz b) {
  double s = b.s();
  double t = b.t();
  const double scale = std::fmax(std::fabs(s), std::fabs(t));
  // Clamp rounding-level negatives on the cone boundary.
  if (s < 0.0 && split_is_zero(s, scale)) s = 0.0;
  if (t < 0.0 && split_is_zero(t, scale)) t = 0.0;
  if (s < 0.0 || t < 0.0) throw Error(ErrorCode::NotInCone, "square root requires u >= 0 and |v| <= u");

  const double rs = std::sqrt(s);
  const double rt = std::sqrt(t);
  if (rs == 0.0 && rt == 0.0) return {Lorentz{}};
  if (rs == 0.0 || rt == 0.0) return {Lorentz::from_split(rs, rt), Lorentz::from_split(-rs, -rt)};
  return {Lorentz::from_split(rs, rt), Lorentz::from_split(-rs, -rt), Lorentz::from_split(rs, -rt),
          Lorentz::from_split(-rs, rt)};
}

Lorentz principal_sqrt(Lorentz b) { return sqrt_all(b).front(); }

LorentzTrig trig(Lorentz theta) {
  const double s = theta.s();
  const double t = theta.t();
  return {Lorentz::from_split(std::cos(s), std::cos(t)), Lorentz::from_split(std::sin(s), std::sin(t))};
}

// ---------------------------------------------------------------------------
// Split quaternions

SplitQuat SplitQuat::from_split(Quat plus, Quat minus) {
  return {Lorentz::from_split(plus.w, minus.w), Lorentz::from_split(plus.x, minus.x),
          Lorentz::from_split(plus.y, minus.y), Lorentz::from_split(plus.z, minus.z)};
}

std::pair<Quat, Quat> SplitQuat::split() const {
  return {Quat{a[0].s(), a[1].s(), a[2].s(), a[3].s()}, Quat{a[0].t(), a[1].t(), a[2].t(), a[3].t()}};
}

double max_abs(const SplitQuat& x) {
  double m = 0.0;
  for (const auto& c : x.a) m = std::max(m, abs_max(c));
  return m;
}

bool is_invertible(const SplitQuat& x) { return is_invertible(H(x, x)); }

bool in_idempotent_halves(const SplitQuat& x) {
  const auto [p, m] = x.split();
  const double np = p.norm();
  const double nm = m.norm();
  const double scale = std::fmax(np, nm);
  if (scale == 0.0) return true;
  // sigma x = x  <=>  xi_- = 0;  sigma x = -x  <=>  xi_+ = 0.
  return np <= std::sqrt(kSingularRelTol) * scale || nm <= std::sqrt(kSingularRelTol) * scale;
}

SplitQuat inverse(const SplitQuat& x) {
  const Lorentz n = H(x, x);
  if (!is_invertible(n)) throw Error(ErrorCode::NotInvertible, "split quaternion lies in H_+ or H_-");
  return inverse(n) * x.bar();
}

double r4_membership_residual(const SplitQuat& xi) { return max_abs(xi.bar().hat() + xi); }

Spinor::Spinor(const SplitQuat& q) : q_(q) {
  const Lorentz n = H(q, q);
  if (abs_max(n - Lorentz{1.0}) > kUnitTol) throw Error(ErrorCode::NotUnit, "H(q, q) != 1");
}

Spinor Spinor::from_pair(Quat plus, Quat minus) { return Spinor(SplitQuat::from_split(plus, minus)); }

Spinor circle_element(Lorentz theta) {
  const auto [c, s] = trig(theta);
  return Spinor(SplitQuat{c, s, 0.0, 0.0});
}

Vec4 rotate_r4(const Spinor& q, const Vec4& x) {
  // hat(q) is unit as well, so hat(q)^-1 = bar(hat(q)).
  const SplitQuat& g = q.value();
  return Vec4::from_embedded(g * x.embed() * g.hat().bar());
}

Vec4 rotate_r4(const SplitQuat& q, const Vec4& x) { return rotate_r4(Spinor(q), x); }

Bivector hopf(const Spinor& g) { return Bivector::from_quat(g.value().bar() * kI * g.value()); }

Bivector hopf(const SplitQuat& g) { return hopf(Spinor(g)); }

SplitQuat cross(const SplitQuat& x, const SplitQuat& y) {
  const SplitQuat d = x * y - y * x;
  return Lorentz{0.5} * d;
}

Lorentz mixed(const SplitQuat& x, const SplitQuat& y, const SplitQuat& z) { return H(cross(x, y), z); }

std::optional<Lorentz> collinear_factor(const SplitQuat& xi, const SplitQuat& xi_prime, double tol) {
  if (!is_invertible(xi)) return std::nullopt;
  if (max_abs(cross(xi, xi_prime)) > tol) return std::nullopt;
  const Lorentz lambda = H(xi_prime, xi) * inverse(H(xi, xi));
  if (max_abs(xi_prime - lambda * xi) > tol * std::fmax(1.0, max_abs(xi_prime))) return std::nullopt;
  return lambda;
}

SplitQuat plane_bivector(const Vec4& v2, const Vec4& v3) { return v2.embed() * v3.embed().hat(); }

}  // namespace flatspin
