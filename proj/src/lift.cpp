#include "flatspin/lift.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "flatspin/error.hpp"
#include "flatspin/format.hpp"

namespace flatspin {

const char* closure_name(Closure c) noexcept {
  switch (c) {
    case Closure::Periodic: return "Periodic";
    case Closure::Antiperiodic: return "Antiperiodic";
    case Closure::Open: return "Open";
  }
  return "Open";
}

namespace {

Quat rhs(const Fourier& psi, double a, Quat g) {
  const double p = psi(a);
  return Quat{0.0, 0.0, std::cos(p), std::sin(p)} * g;
}

Quat qpow(Quat m, long k) {
  if (k < 0) {
    m = m.conj();
    k = -k;
  }
  Quat r = Quat::identity();
  while (k > 0) {
    if (k & 1) r = (r * m).normalized();
    m = (m * m).normalized();
    k >>= 1;
  }
  return r;
}

// Cubic Lagrange weights for nodes at offsets 0,1,2,3 evaluated at x (in node units).
std::array<double, 4> lagrange4(double x) {
  return {-(x - 1) * (x - 2) * (x - 3) / 6.0, x * (x - 2) * (x - 3) / 2.0, -x * (x - 1) * (x - 3) / 2.0,
          x * (x - 1) * (x - 2) / 6.0};
}

template <class T>
T interp_uniform(const std::vector<T>& f, double u) {
  const int n = static_cast<int>(f.size()) - 1;
  int i0 = static_cast<int>(std::floor(u)) - 1;
  i0 = std::clamp(i0, 0, std::max(0, n - 3));
  const auto w = lagrange4(u - i0);
  T r = f[static_cast<std::size_t>(i0)] * w[0];
  for (int k = 1; k < 4; ++k) r = r + f[static_cast<std::size_t>(i0 + k)] * w[static_cast<std::size_t>(k)];
  return r;
}

// Derivative estimate D of g' g^-1 at interior sample i from the symmetric ratio.
Quat log_derivative(const std::vector<Quat>& g, int i, double h) {
  const Quat r = g[static_cast<std::size_t>(i + 1)] * g[static_cast<std::size_t>(i - 1)].conj();
  return (1.0 / (2.0 * h)) * log_unit(r.normalized());
}

}  // namespace

Quat FactorPath::at(double a) const {
  const double k = std::floor(a / length);
  double r = a - k * length;
  Quat base;
  const double u = r / h;
  const double ui = std::round(u);
  if (std::fabs(u - ui) < 1e-12) {
    base = samples[static_cast<std::size_t>(std::clamp(static_cast<int>(ui), 0, intervals()))];
  } else {
    base = interp_uniform(samples, u).normalized();
  }
  if (k == 0.0) return base;
  const Quat m = samples.front().conj() * samples.back();
  return (base * qpow(m.normalized(), static_cast<long>(k))).normalized();
}

FactorPath integrate_factor(const Fourier& psi, double length, int n, Quat g0) {
  if (n < 16) throw Error(ErrorCode::InvalidArgument, "lift needs at least 16 steps");
  if (!(length > 0.0)) throw Error(ErrorCode::InvalidArgument, "lift length must be positive");
  if (std::fabs(g0.norm() - 1.0) > Spinor::kUnitTol) throw Error(ErrorCode::NotUnit, "initial lift value not unit");

  FactorPath p;
  p.length = length;
  p.h = length / n;
  p.samples.resize(static_cast<std::size_t>(n) + 1);
  const double h = p.h;
  Quat g = g0.normalized();
  p.samples[0] = g;
  for (int i = 0; i < n; ++i) {
    const double a = i * h;
    const Quat k1 = rhs(psi, a, g);
    const Quat k2 = rhs(psi, a + 0.5 * h, g + (0.5 * h) * k1);
    const Quat k3 = rhs(psi, a + 0.5 * h, g + (0.5 * h) * k2);
    const Quat k4 = rhs(psi, a + h, g + h * k3);
    g = (g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).normalized();
    p.samples[static_cast<std::size_t>(i) + 1] = g;
  }
  return p;
}

LiftPath integrate_lift(const AngleFunction& psi, int n1, int n2, const Spinor& g0) {
  const auto [p0, m0] = g0.pair();
  LiftPath path;
  path.g1 = integrate_factor(psi.psi1, psi.psi1.period, n1, p0);
  path.g2 = integrate_factor(psi.psi2, psi.psi2.period, n2, m0);
  path.closure = monodromy_class(path);
  return path;
}

ClosureInfo classify_monodromy(Quat m1, Quat m2) {
  const Quat one = Quat::identity();
  const double dp = std::max(distance(m1, one), distance(m2, one));
  const double dm = std::max(distance(m1, -one), distance(m2, -one));
  if (dp <= kClosureTol) return {Closure::Periodic, dp};
  if (dm <= kClosureTol) return {Closure::Antiperiodic, dm};
  return {Closure::Open, std::min(dp, dm)};
}

ClosureInfo monodromy_class(const LiftPath& path) {
  return classify_monodromy(path.g1.monodromy(), path.g2.monodromy());
}

double horizontality_residual(const FactorPath& path, const Fourier& psi) {
  double r = 0.0;
  for (int i = 1; i < path.intervals(); ++i) {
    const Quat d = log_derivative(path.samples, i, path.h);
    const double p = psi(path.param(i));
    r = std::max({r, std::fabs(d.w), std::fabs(d.x), std::fabs(d.y - std::cos(p)), std::fabs(d.z - std::sin(p))});
  }
  return r;
}

double horizontality_residual(const LiftPath& path, const AngleFunction& psi) {
  return std::max(horizontality_residual(path.g1, psi.psi1), horizontality_residual(path.g2, psi.psi2));
}

std::vector<double> extract_angle(const FactorPath& path) {
  const int n = path.intervals();
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "angle extraction needs at least 4 samples");
  std::vector<double> psi(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i < n; ++i) {
    const Quat d = log_derivative(path.samples, i, path.h);
    if (d.norm() < 1e-9) throw Error(ErrorCode::DegeneratePoint, "g' g^-1 vanishes at sample " + std::to_string(i));
    psi[static_cast<std::size_t>(i)] = std::atan2(d.z, d.y);
  }
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 2; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    psi[k] -= two_pi * std::round((psi[k] - psi[k - 1]) / two_pi);
  }
  psi[0] = 2.0 * psi[1] - psi[2];
  const auto last = static_cast<std::size_t>(n);
  psi[last] = 2.0 * psi[last - 1] - psi[last - 2];
  const double shift = two_pi * std::floor(psi[0] / two_pi);
  for (double& v : psi) v -= shift;
  return psi;
}

AngleSamples extract_angle(const LiftPath& path) { return {extract_angle(path.g1), extract_angle(path.g2)}; }

std::vector<Quat> sample_derivative(const std::vector<Quat>& g, double h) {
  const int n = static_cast<int>(g.size()) - 1;
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "derivative needs at least 5 samples");
  auto at = [&](int i) { return g[static_cast<std::size_t>(i)]; };
  std::vector<Quat> d(g.size());
  const double c = 1.0 / (12.0 * h);
  d[0] = c * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4));
  d[1] = c * (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4));
  for (int i = 2; i <= n - 2; ++i) d[static_cast<std::size_t>(i)] = c * (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2));
  d[static_cast<std::size_t>(n - 1)] = -c * (-3.0 * at(n) - 10.0 * at(n - 1) + 18.0 * at(n - 2) - 6.0 * at(n - 3) + at(n - 4));
  d[static_cast<std::size_t>(n)] = -c * (-25.0 * at(n) + 48.0 * at(n - 1) - 36.0 * at(n - 2) + 16.0 * at(n - 3) - 3.0 * at(n - 4));
  return d;
}

ArclengthChart arclength_chart(const std::vector<Quat>& raw, double h, int n_out) {
  const int n = static_cast<int>(raw.size()) - 1;
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "arc-length chart needs at least 5 samples");
  if (n_out <= 0) n_out = n;

  ArclengthChart out;
  const auto d = sample_derivative(raw, h);
  out.speed.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.speed[i] = d[i].norm();
    if (out.speed[i] < 1e-9) throw Error(ErrorCode::NotImmersed, "stationary sample " + std::to_string(i));
  }

  // Cumulative arc length, fourth-order per-interval quadrature.
  const auto& f = out.speed;
  std::vector<double> L(raw.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    double seg;
    if (i == 0) {
      seg = h * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0;
    } else if (i == n - 1) {
      seg = h * (9.0 * f[k + 1] + 19.0 * f[k] - 5.0 * f[k - 1] + f[k - 2]) / 24.0;
    } else {
      seg = h * (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2]) / 24.0;
    }
    L[k + 1] = L[k] + seg;
  }

  const double total = L.back();
  out.path.length = total;
  out.path.h = total / n_out;
  out.path.samples.resize(static_cast<std::size_t>(n_out) + 1);
  out.mu.resize(static_cast<std::size_t>(n_out) + 1);
  std::size_t seg = 0;
  for (int j = 0; j <= n_out; ++j) {
    const double b = j * out.path.h;
    while (seg + 1 < static_cast<std::size_t>(n) && L[seg + 1] < b) ++seg;
    // Inverse interpolation of a(L) through four neighbouring nodes.
    const int i0 = std::clamp(static_cast<int>(seg) - 1, 0, n - 3);
    double a = 0.0;
    for (int p = 0; p < 4; ++p) {
      double w = 1.0;
      for (int q = 0; q < 4; ++q) {
        if (q == p) continue;
        w *= (b - L[static_cast<std::size_t>(i0 + q)]) / (L[static_cast<std::size_t>(i0 + p)] - L[static_cast<std::size_t>(i0 + q)]);
      }
      a += w * (i0 + p) * h;
    }
    if (j == 0) a = 0.0;
    if (j == n_out) a = n * h;
    out.mu[static_cast<std::size_t>(j)] = a;
    out.path.samples[static_cast<std::size_t>(j)] = interp_uniform(raw, a / h).normalized();
  }
  return out;
}

std::string lift_csv(const LiftPath& path) {
  std::ostringstream os;
  os << "factor,index,param,q0,q1,q2,q3\n";
  int factor = 1;
  for (const FactorPath* f : {&path.g1, &path.g2}) {
    for (int i = 0; i <= f->intervals(); ++i) {
      const Quat& q = f->samples[static_cast<std::size_t>(i)];
      os << factor << ',' << i << ',' << fmt17(f->param(i)) << ',' << fmt17(q.w) << ',' << fmt17(q.x) << ','
         << fmt17(q.y) << ',' << fmt17(q.z) << '\n';
    }
    ++factor;
  }
  return os.str();
}

}  // namespace flatspin
