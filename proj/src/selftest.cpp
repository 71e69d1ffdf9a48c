#include "flatspin/selftest.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "flatspin/splitquat.hpp"

namespace flatspin {

namespace {

struct Sampler {
  std::mt19937_64 rng;
  double uni(double a = -1.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng); }
  Lorentz lz() { return {uni(), uni()}; }
  SplitQuat sq() { return {lz(), lz(), lz(), lz()}; }
  Quat quat() { return {uni(), uni(), uni(), uni()}; }
  Vec4 vec() { return {{uni(), uni(), uni(), uni()}}; }
};

void record(SelfCheck& c, double err, double scale) {
  double rel = err / std::fmax(1.0, scale);
  ++c.trials;
  if (!(rel <= c.tolerance)) ++c.failures;
  c.max_error = std::fmax(c.max_error, rel);
}

void record_bool(SelfCheck& c, bool ok) {
  ++c.trials;
  if (!ok) ++c.failures;
}

// (a.u + a.v sigma)(b.u + b.v sigma) by components
Lorentz naive_mul(Lorentz a, Lorentz b) { return {a.u * b.u + a.v * b.v, a.u * b.v + a.v * b.u}; }

SplitQuat singular(Sampler& r, long i) {
  const Quat q = r.quat();
  switch (i % 4) {
    case 0: return Lorentz{1.0, 1.0} * SplitQuat::from_real(q);
    case 1: return Lorentz{1.0, -1.0} * SplitQuat::from_real(q);
    case 2: return SplitQuat::from_split(Quat{0.0, 0.0, 0.0, 0.0}, q);
    default: return SplitQuat::from_split(q, Quat{0.0, 0.0, 0.0, 0.0});
  }
}

}  // namespace

SelfTestReport run_selftest(long trials, std::uint64_t seed, double algebra_tol, double rotation_tol, long rotation_trials) {
  Sampler r{std::mt19937_64(seed)};
  SelfCheck mult{"norm_multiplicativity", 0, 0, 0.0, algebra_tol};
  SelfCheck cls{"invertibility_classification", 0, 0, 0.0, 0.0};
  SelfCheck roots{"sqrt_enumeration", 0, 0, 0.0, algebra_tol};
  SelfCheck br{"bracket_symmetries", 0, 0, 0.0, algebra_tol};
  SelfCheck rot_i{"rotation_x2x3", 0, 0, 0.0, rotation_tol};
  SelfCheck rot_s{"rotation_x0x1", 0, 0, 0.0, rotation_tol};

  for (long i = 0; i < trials; ++i) {
    const SplitQuat a = r.sq(), b = r.sq();
    const Lorentz lhs = H(a * b, a * b), rhs = H(a, a) * H(b, b);
    record(mult, abs_max(lhs - rhs), abs_max(rhs));
  }

  for (long i = 0; i < trials; ++i) {
    // alternate generic elements with elements of the two idempotent halves
    const SplitQuat x = i % 2 ? r.sq() : singular(r, i / 2);
    const bool inv = is_invertible(x);
    bool agree = inv == !in_idempotent_halves(x) && inv == is_invertible(H(x, x)) && inv == (i % 2 == 1);
    record_bool(cls, agree);
  }

  for (long i = 0; i < trials; ++i) {
    const Lorentz b = Lorentz::from_split(r.uni(1e-3, 4.0), r.uni(1e-3, 4.0));
    const std::vector<Lorentz> rs = sqrt_all(b);
    double err = 0.0;
    bool distinct = rs.size() == 4;
    for (std::size_t k = 0; k < rs.size(); ++k) {
      err = std::fmax(err, abs_max(naive_mul(rs[k], rs[k]) - b));
      for (std::size_t m = 0; m < k; ++m)
        if (abs_max(rs[k] - rs[m]) <= 1e-12) distinct = false;
    }
    record(roots, distinct ? err : INFINITY, abs_max(b));
  }

  for (long i = 0; i < trials; ++i) {
    const SplitQuat phi = r.sq(), psi = r.sq();
    const SplitQuat x = r.vec().embed();
    auto act = [&](const SplitQuat& s) { return x * s.hat(); };
    const double e1 = distance(bracket(act(phi), psi), -bracket(phi, act(psi)).hat());
    const double e2 = distance(bracket(phi, psi), bracket(psi, phi).bar());
    record(br, std::fmax(e1, e2), 1.0);
  }

  for (long i = 0; i < rotation_trials; ++i) {
    const double th = r.uni(-std::numbers::pi, std::numbers::pi);
    const double c = std::cos(th), s = std::sin(th), c2 = std::cos(2.0 * th), s2 = std::sin(2.0 * th);
    const Vec4 x = r.vec();
    const Vec4 yi = rotate_r4(Spinor(SplitQuat{c, s, 0.0, 0.0}), x);
    const Vec4 ei{{x[0], x[1], c2 * x[2] - s2 * x[3], s2 * x[2] + c2 * x[3]}};
    record(rot_i, norm(yi - ei), 1.0);
    const Vec4 ys = rotate_r4(Spinor(SplitQuat{c, Lorentz{0.0, s}, 0.0, 0.0}), x);
    const Vec4 es{{c2 * x[0] - s2 * x[1], s2 * x[0] + c2 * x[1], x[2], x[3]}};
    record(rot_s, norm(ys - es), 1.0);
  }

  return {{mult, cls, roots, br, rot_i, rot_s}};
}

}  // namespace flatspin
