#include "flatspin/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "flatspin/format.hpp"
#include "flatspin/parallel.hpp"

namespace flatspin {

namespace {

using std::numbers::pi;

// Bound on max f - max over samples (and the same for the minimum): around a true extremum f' = 0,
// so the nearest sample is off by at most sup|f''| (h/2)^2 / 2.
double extremum_pad(const Fourier& f, int samples) {
  const double w = 2.0 * pi / f.period;
  double m2 = 0.0;
  for (std::size_t k = 0; k < f.harmonics.size(); ++k) {
    const double kw = static_cast<double>(k + 1) * w;
    m2 += kw * kw * std::hypot(f.harmonics[k].first, f.harmonics[k].second);
  }
  const double h = f.period / samples;
  return 0.5 * m2 * 0.25 * h * h;
}

constexpr int kExtremaSamples = 4096;

void check_range(const AngleFunction& psi, TorusValidation& v) {
  v.psi1_min = psi.psi1.min_value(kExtremaSamples);
  v.psi1_max = psi.psi1.max_value(kExtremaSamples);
  v.psi2_min = psi.psi2.min_value(kExtremaSamples);
  v.psi2_max = psi.psi2.max_value(kExtremaSamples);
  v.pad1 = extremum_pad(psi.psi1, kExtremaSamples);
  v.pad2 = extremum_pad(psi.psi2, kExtremaSamples);
  const double lo = (v.psi1_min - v.pad1) - (v.psi2_max + v.pad2);
  const double hi = (v.psi1_max + v.pad1) - (v.psi2_min - v.pad2);
  v.theta2_min = 0.5 * lo;
  v.theta2_max = 0.5 * hi;
  const double q = std::floor(lo / pi);
  if (hi >= (q + 1.0) * pi || lo <= q * pi) {
    v.status = ErrorCode::NotImmersed;
    v.message = "theta2 range [" + fmt17(v.theta2_min) + ", " + fmt17(v.theta2_max) + "] meets a multiple of pi/2";
    return;
  }
  const long qi = static_cast<long>(q);
  if (qi % 2 == 0) {
    v.status = ErrorCode::OrientationReversed;
    v.message = "theta2 range lies in (0, pi/2) mod pi; swap psi1 and psi2 or shift by pi";
    return;
  }
  v.k = (qi - 1) / 2;
  v.range_ok = true;
}

void check_lattice(const Lattice& l, TorusValidation& v) {
  v.det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
  if (v.det == 0) {
    v.status = ErrorCode::InvalidLattice;
    v.message = "lattice generators are dependent";
    return;
  }
  if (std::gcd(l[0][0], l[1][0]) != 1 || std::gcd(l[0][1], l[1][1]) != 1) {
    v.status = ErrorCode::InvalidLattice;
    v.message = "coordinate subgroups differ from S Z and T Z (gcd of a lattice column is not 1)";
    return;
  }
  v.lattice_ok = true;
}

void check_closure(const LiftPath& lift, const Lattice& l, TorusValidation& v) {
  v.closure1 = classify_monodromy(lift.g1.monodromy(), lift.g1.monodromy());
  v.closure2 = classify_monodromy(lift.g2.monodromy(), lift.g2.monodromy());
  v.closure = lift.closure.kind;
  if (v.closure == Closure::Open) {
    v.status = ErrorCode::NotClosed;
    v.message = "lift monodromy is not +-1 (defect " + fmt17(lift.closure.defect) + ")";
    return;
  }
  v.parity_ok = true;
  if (v.closure == Closure::Antiperiodic) {
    for (const auto& gen : l) {
      if (((gen[0] - gen[1]) % 2) != 0) v.parity_ok = false;
    }
  }
  if (!v.parity_ok) {
    v.status = ErrorCode::LatticeParity;
    v.message = "antiperiodic lift needs m = n mod 2 for every lattice generator";
  }
}

TorusValidation validate_with(const TorusSpec& spec, const LiftPath& lift) {
  TorusValidation v;
  check_range(spec.psi, v);
  if (!v.ok()) return v;
  check_lattice(spec.lattice, v);
  if (!v.ok()) return v;
  check_closure(lift, spec.lattice, v);
  return v;
}

Vec3 imag3(Quat q) { return {q.x, q.y, q.z}; }
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

// conj(q) X q for imaginary X.
Vec3 conjugate_by(Quat q, Quat X) { return imag3(q.conj() * X * q); }

}  // namespace

TorusValidation validate_torus(const TorusSpec& spec, int n) {
  TorusValidation v;
  check_range(spec.psi, v);
  if (!v.ok()) return v;
  return validate_with(spec, integrate_lift(spec.psi, n, n, Spinor()));
}

Vec4 TorusPatch::eval(double s, double t) const { return Vec4::from_quat(lift.g1.at(s).conj() * lift.g2.at(t)); }

TorusPatch build_torus(const TorusSpec& spec, int n1, int n2, bool force) {
  TorusPatch out;
  out.spec = spec;
  out.lift = integrate_lift(spec.psi, n1, n2, Spinor());
  out.validation = validate_with(spec, out.lift);
  if (!out.validation.ok() && !force) throw Error(out.validation.status, out.validation.message);

  const double S = spec.psi.psi1.period, T = spec.psi.psi2.period;
  SurfacePatch& p = out.patch;
  p.grid = GridSpec{0.0, 0.0, S / n1, n1, n2, T / n2};
  p.F.resize(p.grid.size());
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i)
      p.F[p.grid.index(i, j)] = Vec4::from_quat(out.lift.g1.samples[static_cast<std::size_t>(i)].conj() * out.lift.g2.samples[static_cast<std::size_t>(j)]);
  p.spherical = true;
  // Only a periodic lift closes up on [0, S) x [0, T).
  p.periodic_x = p.periodic_y = out.lift.closure.kind == Closure::Periodic;
  return out;
}

std::pair<Vec4, Vec4> torus_tangents(const AngleFunction& psi, const Spinor& g, double s, double t) {
  const double th1 = psi.theta1(s, t), th2 = psi.theta2(s, t);
  const SplitQuat gb = g.value().bar(), gh = g.value().hat();
  const double c1 = std::cos(th1), s1 = std::sin(th1);
  const SplitQuat fx = gb * SplitQuat{0.0, 0.0, 2.0 * std::sin(th2) * s1, -2.0 * std::sin(th2) * c1} * gh;
  const SplitQuat fy = gb * SplitQuat{0.0, 0.0, -2.0 * std::cos(th2) * c1, -2.0 * std::cos(th2) * s1} * gh;
  return {Vec4::from_embedded(fx), Vec4::from_embedded(fy)};
}

double torus_metric_residual(const SurfacePatch& patch, const AngleFunction& psi) {
  const GridSpec& g = patch.grid;
  double r = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      PatchDerivatives d;
      if (!patch_derivatives(patch, i, j, d)) continue;
      const Vec4 Fx = d.Fx + d.Fy, Fy = d.Fx - d.Fy;  // grid directions are s and t
      const double th2 = psi.theta2(g.x(i), g.y(j));
      const double sn = std::sin(th2), cs = std::cos(th2);
      r = std::max({r, std::fabs(dot(Fx, Fx) - 4.0 * sn * sn), std::fabs(dot(Fy, Fy) - 4.0 * cs * cs), std::fabs(dot(Fx, Fy))});
    }
  }
  return r;
}

double torus_metric_residual(const TorusPatch& torus) { return torus_metric_residual(torus.patch, torus.spec.psi); }

PipelineComparison compare_with_surface_pipeline(const TorusPatch& torus, int nodes) {
  const double h = torus.lift.g1.h;
  if (std::fabs(torus.lift.g2.h - h) > 1e-12 * h) throw Error(ErrorCode::GridMismatch, "pipeline comparison needs equal s and t spacing");
  const GridSpec g{0.0, 0.0, h, nodes, nodes};
  const MetricField field = torus_metric_field(torus.spec.psi, g);
  PipelineComparison out;
  const PatchResult res = synthesize_patch(torus.spec.psi, torus.lift, field);
  out.report = res.report;

  SurfacePatch direct;
  direct.grid = g;
  direct.F.resize(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) direct.F[g.index(i, j)] = torus.eval(s_of(g.x(i), g.y(j)), t_of(g.x(i), g.y(j)));

  const Vec4 c = res.patch.F[0] + direct.F[0];
  for (std::size_t k = 0; k < g.size(); ++k) out.offset = std::max(out.offset, norm(res.patch.F[k] + direct.F[k] - c));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      PatchDerivatives a, b;
      if (!patch_derivatives(res.patch, i, j, a) || !patch_derivatives(direct, i, j, b)) continue;
      out.first_form = std::max({out.first_form, std::fabs(dot(a.Fx, a.Fx) - dot(b.Fx, b.Fx)),
                                 std::fabs(dot(a.Fx, a.Fy) - dot(b.Fx, b.Fy)), std::fabs(dot(a.Fy, a.Fy) - dot(b.Fy, b.Fy))});
    }
  }
  return out;
}

SphereCurve measure_sphere_curve(const std::function<Vec3(double)>& gamma, double period, int n) {
  if (n < 8) throw Error(ErrorCode::InvalidArgument, "curve needs at least 8 samples");
  constexpr int kGhost = 4;
  // Eighth-order central differences.
  static constexpr double d1[4] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  static constexpr double d2c = -205.0 / 72;
  static constexpr double d2[4] = {8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};
  const double h = period / n;
  std::vector<Vec3> pts(static_cast<std::size_t>(n + 1 + 2 * kGhost));
  for (int i = -kGhost; i <= n + kGhost; ++i) pts[static_cast<std::size_t>(i + kGhost)] = gamma(i * h);
  auto P = [&](int i) -> const Vec3& { return pts[static_cast<std::size_t>(i + kGhost)]; };

  SphereCurve c;
  c.param.resize(static_cast<std::size_t>(n + 1));
  c.points.resize(c.param.size());
  c.unit_tangent.resize(c.param.size());
  c.curvature.resize(c.param.size());
  c.speed.resize(c.param.size());
  c.arclength.assign(c.param.size(), 0.0);
  for (int i = 0; i <= n; ++i) {
    Vec3 g1{}, g2{};
    for (int q = 0; q < 3; ++q) {
      double a = 0.0, b = d2c * P(i)[static_cast<std::size_t>(q)];
      for (int k = 1; k <= 4; ++k) {
        const double plus = P(i + k)[static_cast<std::size_t>(q)], minus = P(i - k)[static_cast<std::size_t>(q)];
        a += d1[k - 1] * (plus - minus);
        b += d2[k - 1] * (plus + minus);
      }
      g1[static_cast<std::size_t>(q)] = a / h;
      g2[static_cast<std::size_t>(q)] = b / (h * h);
    }
    const auto ui = static_cast<std::size_t>(i);
    const Vec3& p = P(i);
    const double sp = norm3(g1);
    const Vec3 inner{-p[0], -p[1], -p[2]};
    c.param[ui] = i * h;
    c.points[ui] = p;
    c.speed[ui] = sp;
    c.unit_tangent[ui] = {g1[0] / sp, g1[1] / sp, g1[2] / sp};
    c.curvature[ui] = dot3(g2, cross3(inner, g1)) / (sp * sp * sp);
  }
  // Cumulative arc length with cubic quadrature.
  for (int i = 0; i < n; ++i) {
    const auto f = [&](int k) { return c.speed[static_cast<std::size_t>(std::clamp(k, 0, n))]; };
    double inc;
    if (i == 0)
      inc = (h / 24.0) * (9.0 * f(0) + 19.0 * f(1) - 5.0 * f(2) + f(3));
    else if (i == n - 1)
      inc = (h / 24.0) * (f(n - 3) - 5.0 * f(n - 2) + 19.0 * f(n - 1) + 9.0 * f(n));
    else
      inc = (h / 24.0) * (-f(i - 1) + 13.0 * f(i) + 13.0 * f(i + 1) - f(i + 2));
    c.arclength[static_cast<std::size_t>(i + 1)] = c.arclength[static_cast<std::size_t>(i)] + inc;
  }
  return c;
}

double total_curvature(const SphereCurve& c) {
  const std::size_t n = c.param.size() - 1;
  const double h = c.param[1] - c.param[0];
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += c.curvature[i] * c.speed[i];
  return sum * h;
}

namespace {

bool sin_positive(double lo, double hi, double alpha) {
  if (hi - lo >= pi) return false;
  const double a = std::fmod(std::fmod(lo - alpha, 2.0 * pi) + 2.0 * pi, 2.0 * pi);
  return a > 0.0 && a + (hi - lo) < pi;
}

}  // namespace

double kitagawa_alpha(const TorusSpec& spec, const TorusValidation& v) {
  if (!v.range_ok) throw Error(ErrorCode::NoAdmissibleAlpha, "psi ranges violate the interval condition");
  const double lo1 = v.psi1_min - v.pad1, hi1 = v.psi1_max + v.pad1;
  const double lo2 = v.psi2_min - v.pad2, hi2 = v.psi2_max + v.pad2;
  auto admissible = [&](double a) { return sin_positive(lo1, hi1, a) && sin_positive(lo2, hi2, a); };
  if (spec.alpha) {
    if (!admissible(*spec.alpha)) throw Error(ErrorCode::NoAdmissibleAlpha, "alpha = " + fmt17(*spec.alpha) + " gives sin(psi - alpha) <= 0");
    return *spec.alpha;
  }
  const double k = static_cast<double>(v.k);
  const double a = hi2 + (2.0 * k + 1.0) * pi, b = lo1;
  if (!(a < b)) throw Error(ErrorCode::NoAdmissibleAlpha, "empty interval (max psi2 + (2k+1) pi, min psi1)");
  const double mid = 0.5 * (a + b);
  if (admissible(mid)) return mid;
  const double a2 = std::max(a, hi1 - pi), b2 = std::min(b, lo2 + (2.0 * k + 2.0) * pi);
  if (a2 < b2 && admissible(0.5 * (a2 + b2))) return 0.5 * (a2 + b2);
  throw Error(ErrorCode::NoAdmissibleAlpha, "no alpha with sin(psi1 - alpha) > 0 and sin(psi2 - alpha) > 0");
}

KitagawaData kitagawa_extract(const TorusSpec& spec, const LiftPath& lift, int samples) {
  TorusValidation v;
  check_range(spec.psi, v);
  KitagawaData out;
  out.alpha = kitagawa_alpha(spec, v);
  const Quat Ja{0.0, 0.0, std::cos(out.alpha), std::sin(out.alpha)};
  const FactorPath* paths[2] = {&lift.g1, &lift.g2};
  const Fourier* angles[2] = {&spec.psi.psi1, &spec.psi.psi2};
  SphereCurve* curves[2] = {&out.gamma1, &out.gamma2};
  double* errs[2] = {&out.curvature_error1, &out.curvature_error2};
  for (int f = 0; f < 2; ++f) {
    const FactorPath& path = *paths[f];
    *curves[f] = measure_sphere_curve([&](double a) { return conjugate_by(path.at(a), Ja); }, path.length, samples);
    const SphereCurve& c = *curves[f];
    for (std::size_t i = 0; i < c.param.size(); ++i) {
      const double expect = 1.0 / std::tan((*angles[f])(c.param[i]) - out.alpha);
      *errs[f] = std::max(*errs[f], std::fabs(c.curvature[i] - expect));
      const Quat g = path.at(c.param[i]);
      const Vec3 p = conjugate_by(g, Ja), tangent = conjugate_by(g, kQI);
      Vec3 dp{}, dt{};
      for (int q = 0; q < 3; ++q) {
        dp[static_cast<std::size_t>(q)] = p[static_cast<std::size_t>(q)] - c.points[i][static_cast<std::size_t>(q)];
        dt[static_cast<std::size_t>(q)] = tangent[static_cast<std::size_t>(q)] - c.unit_tangent[i][static_cast<std::size_t>(q)];
      }
      out.lift_residual = std::max({out.lift_residual, norm3(dp), norm3(dt)});
    }
  }
  const auto [m1, x1] = std::minmax_element(out.gamma1.curvature.begin(), out.gamma1.curvature.end());
  const auto [m2, x2] = std::minmax_element(out.gamma2.curvature.begin(), out.gamma2.curvature.end());
  out.k1_min = *m1;
  out.k1_max = *x1;
  out.k2_min = *m2;
  out.k2_max = *x2;
  out.disjoint = out.k1_max < out.k2_min || out.k2_max < out.k1_min;
  return out;
}

namespace {

struct ArcRange {
  double min, max;
};

// Range of int k ds over arcs [a, b] and wrapped arcs, a < b sample indices.
ArcRange arc_range(const SphereCurve& c) {
  const std::size_t n = c.param.size() - 1;
  const double h = c.param[1] - c.param[0];
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    cum[i + 1] = cum[i] + 0.5 * h * (c.curvature[i] * c.speed[i] + c.curvature[i + 1] * c.speed[i + 1]);
  const double total = cum[n];
  double best_up = -INFINITY, best_down = INFINITY;
  double run_min = cum[0], run_max = cum[0];
  for (std::size_t b = 1; b <= n; ++b) {
    best_up = std::max(best_up, cum[b] - run_min);
    best_down = std::min(best_down, cum[b] - run_max);
    run_min = std::min(run_min, cum[b]);
    run_max = std::max(run_max, cum[b]);
  }
  return {std::min(best_down, total - best_up), std::max(best_up, total - best_down)};
}

}  // namespace

WindowStat window_statistic(const SphereCurve& c1, const SphereCurve& c2) {
  const ArcRange a = arc_range(c1), b = arc_range(c2);
  return {a.min - b.max, a.max - b.min};
}

double sphere_degree(const std::function<Vec3(double, double)>& map, double S, double T, int n1, int n2) {
  std::vector<Vec3> v(static_cast<std::size_t>(n1 + 1) * static_cast<std::size_t>(n2 + 1));
  auto at = [&](int i, int j) -> Vec3& { return v[static_cast<std::size_t>(j) * static_cast<std::size_t>(n1 + 1) + static_cast<std::size_t>(i)]; };
  for (int j = 0; j <= n2; ++j)
    for (int i = 0; i <= n1; ++i) at(i, j) = map(i * S / n1, j * T / n2);
  auto solid = [](const Vec3& a, const Vec3& b, const Vec3& c) {
    return 2.0 * std::atan2(dot3(a, cross3(b, c)), 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a));
  };
  double area = 0.0;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      area += solid(at(i, j), at(i + 1, j), at(i + 1, j + 1));
      area += solid(at(i, j), at(i + 1, j + 1), at(i, j + 1));
    }
  }
  return area / (4.0 * pi);
}

GaussImage gauss_image(const LiftPath& lift, int samples) {
  GaussImage out;
  out.g1 = measure_sphere_curve([&](double a) { return conjugate_by(lift.g1.at(a), kQI); }, lift.g1.length, samples);
  out.g2 = measure_sphere_curve([&](double a) { return conjugate_by(lift.g2.at(a), kQI); }, lift.g2.length, samples);
  out.total1 = total_curvature(out.g1);
  out.total2 = total_curvature(out.g2);
  out.window = window_statistic(out.g1, out.g2);

  // G1, G2 are the split components of hopf(g).
  const int m = 32;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double s = i * lift.g1.length / m, t = j * lift.g2.length / m;
      const Bivector b = hopf(lift.at(s, t));
      const Vec3 plus{b.a.s(), b.b.s(), b.c.s()}, minus{b.a.t(), b.b.t(), b.c.t()};
      const Vec3 e1 = conjugate_by(lift.g1.at(s), kQI), e2 = conjugate_by(lift.g2.at(t), kQI);
      for (int q = 0; q < 3; ++q) {
        const auto uq = static_cast<std::size_t>(q);
        out.hopf_residual = std::max({out.hopf_residual, std::fabs(plus[uq] - e1[uq]), std::fabs(minus[uq] - e2[uq])});
      }
    }
  }
  const int nd = 64;
  out.degree1 = sphere_degree([&](double s, double) { return conjugate_by(lift.g1.at(s), kQI); }, lift.g1.length, lift.g2.length, nd, nd);
  out.degree2 = sphere_degree([&](double, double t) { return conjugate_by(lift.g2.at(t), kQI); }, lift.g1.length, lift.g2.length, nd, nd);
  return out;
}

GaussBonnet gauss_bonnet(const TorusPatch& torus, const GaussImage& image) {
  if (!torus.patch.periodic_x || !torus.patch.periodic_y)
    throw Error(ErrorCode::NotClosed, "curvature integrals need a periodic torus patch");
  const FundForms ff = estimate_fundamental_forms(torus.patch);
  const double cell = torus.patch.grid.step_x() * torus.patch.grid.step_y();
  GaussBonnet out;
  for (const auto& s : ff.samples) {
    const double area = std::sqrt(std::max(0.0, s.E * s.G - s.F * s.F)) * cell;
    out.int_K += s.K * area;
    out.int_KN += s.KN * area;
  }
  out.max_abs_K = ff.max_abs_K;
  out.max_abs_KN = ff.max_abs_KN;
  out.residual_K = std::fabs(out.int_K - 2.0 * pi * (image.degree1 + image.degree2));
  out.residual_KN = std::fabs(out.int_KN - 2.0 * pi * (image.degree1 - image.degree2));
  return out;
}

std::string curve_csv(const SphereCurve& c) {
  std::ostringstream os;
  os << "param,p1,p2,p3\n";
  for (std::size_t i = 0; i < c.param.size(); ++i)
    os << fmt17(c.param[i]) << ',' << fmt17(c.points[i][0]) << ',' << fmt17(c.points[i][1]) << ',' << fmt17(c.points[i][2]) << '\n';
  return os.str();
}

double close_factor_period(Fourier f, int n, double lo, double hi) {
  auto mono = [&](double S) {
    f.period = S;
    return integrate_factor(f, S, n, Quat::identity()).monodromy();
  };
  const Quat m0 = mono(lo);
  int comp = 1;
  for (int c = 2; c <= 3; ++c)
    if (std::fabs(m0[c]) > std::fabs(m0[comp])) comp = c;
  // Regula falsi (Illinois) so the iterate stays inside [lo, hi].
  double a = lo, b = hi, fa = m0[comp], fb = mono(hi)[comp];
  if (fa * fb > 0.0) throw Error(ErrorCode::NotClosed, "monodromy component keeps its sign on [" + fmt17(lo) + ", " + fmt17(hi) + "]");
  int side = 0;
  double c = b;
  for (int it = 0; it < 100; ++it) {
    c = (a * fb - b * fa) / (fb - fa);
    const double fc = mono(c)[comp];
    if (fc == 0.0 || std::fabs(b - a) <= 1e-14 * std::fabs(c)) break;
    if (fc * fb > 0.0) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  b = c;
  const ClosureInfo info = classify_monodromy(mono(b), mono(b));
  if (info.kind == Closure::Open) throw Error(ErrorCode::NotClosed, "no closing period found (defect " + fmt17(info.defect) + ")");
  return b;
}

}  // namespace flatspin
