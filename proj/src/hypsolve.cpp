#include "flatspin/hypsolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "flatspin/error.hpp"
#include "flatspin/format.hpp"
#include "flatspin/parallel.hpp"

namespace flatspin {

CauchyData torus_cauchy_data(const AngleFunction& psi, int n) {
  CauchyData d;
  d.h = psi.psi2.period / n;
  d.periodic = true;
  for (int j = 0; j <= n; ++j) {
    const double th2 = psi.theta2(0.0, j * d.h);
    d.lambda0.push_back(-2.0 * std::sin(th2));
    d.mu0.push_back(2.0 * std::cos(th2));
  }
  return d;
}

MetricField torus_metric_field(const AngleFunction& psi, const GridSpec& grid) {
  MetricField f{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double th2 = psi.theta2(s_of(grid.x(i), grid.y(j)), t_of(grid.x(i), grid.y(j)));
      f.lambda[grid.index(i, j)] = -2.0 * std::sin(th2);
      f.mu[grid.index(i, j)] = 2.0 * std::cos(th2);
    }
  }
  return f;
}

namespace {

struct Target {
  int m;
  std::size_t out;
};

int nearest_int(double v, const char* what) {
  const double r = std::round(v);
  if (std::fabs(v - r) > 1e-9) throw Error(ErrorCode::GridMismatch, std::string(what) + " is not on the characteristic lattice");
  return static_cast<int>(r);
}

}  // namespace

MetricField solve_cauchy(const AngleFunction& psi, const CauchyData& data, const GridSpec& grid) {
  const int n = data.intervals();
  if (n < 2 || data.mu0.size() != data.lambda0.size()) throw Error(ErrorCode::InvalidArgument, "Cauchy data needs matching arrays of at least 3 samples");
  if (!(data.h > 0.0)) throw Error(ErrorCode::InvalidArgument, "Cauchy data spacing must be positive");
  if (std::fabs(grid.h - data.h) > 1e-12 * data.h || std::fabs(grid.step_y() - data.h) > 1e-12 * data.h) throw Error(ErrorCode::GridMismatch, "grid spacing differs from the data spacing");
  for (int j = 0; j <= n; ++j) {
    if (!(data.lambda0[static_cast<std::size_t>(j)] * data.mu0[static_cast<std::size_t>(j)] > 0.0))
      throw Error(ErrorCode::SignLoss, "lambda0 mu0 <= 0 at data sample " + std::to_string(j));
  }
  const double h = data.h;
  const int width = data.periodic ? n : n + 1;
  auto wrap = [&](int m) { return data.periodic ? ((m % n) + n) % n : m; };

  // Group output nodes by characteristic level k = s / h.
  std::map<int, std::vector<Target>> targets;
  int kmin = 0, kmax = 0;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i), y = grid.y(j);
      const int k = nearest_int(s_of(x, y) / h, "node s");
      const int m = nearest_int(t_of(x, y) / h, "node t");
      if (!data.periodic && (m - std::abs(k) < 0 || m + std::abs(k) > n))
        throw Error(ErrorCode::DomainError, "node (" + fmt17(x) + ", " + fmt17(y) + ") lies outside the domain of determinacy");
      targets[k].push_back({wrap(m), grid.index(i, j)});
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
    }
  }

  MetricField out{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  std::vector<double> dpsi2(static_cast<std::size_t>(width));
  for (int m = 0; m < width; ++m) dpsi2[static_cast<std::size_t>(m)] = psi.psi2.derivative(m * h);

  auto emit = [&](int k, const std::vector<double>& lam, const std::vector<double>& mu) {
    auto it = targets.find(k);
    if (it == targets.end()) return;
    for (const Target& tg : it->second) {
      out.lambda[tg.out] = lam[static_cast<std::size_t>(tg.m)];
      out.mu[tg.out] = mu[static_cast<std::size_t>(tg.m)];
    }
  };

  const std::vector<double> lam0(data.lambda0.begin(), data.lambda0.begin() + width);
  const std::vector<double> mu0(data.mu0.begin(), data.mu0.begin() + width);
  emit(0, lam0, mu0);

  for (int dir : {+1, -1}) {
    const int steps = dir > 0 ? kmax : -kmin;
    std::vector<double> lam = lam0, mu = mu0, nlam(lam.size()), nmu(mu.size());
    for (int step = 0; step < steps; ++step) {
      const int k = dir * step;
      const int k1 = k + dir;
      const double d1_old = psi.psi1.derivative(k * h);
      const double d1_new = psi.psi1.derivative(k1 * h);
      // Nodes on level k1 that stay inside the data footprint.
      const int lo = data.periodic ? 0 : std::abs(k1);
      const int hi = data.periodic ? n - 1 : n - std::abs(k1);
      const double half = 0.5 * h * dir;
      parallel_for(std::max(0, hi - lo + 1), [&](int idx) {
        const int m = lo + idx;
        // Foot of the lambda characteristic (direction (1, -1)) and of the mu one (direction (1, 1)).
        const int ml = wrap(m + dir);
        const int mm = wrap(m - dir);
        const auto uml = static_cast<std::size_t>(ml), umm = static_cast<std::size_t>(mm), um = static_cast<std::size_t>(m);
        const double a0 = -0.5 * (d1_old + dpsi2[uml]);
        const double b0 = -0.5 * (dpsi2[umm] - d1_old);
        const double a1 = -0.5 * (d1_new + dpsi2[um]);
        const double b1 = -0.5 * (dpsi2[um] - d1_new);
        const double A = lam[uml] + half * a0 * mu[uml];
        const double B = mu[umm] + half * b0 * lam[umm];
        const double p = half * a1, q = half * b1;
        const double l1 = (A + p * B) / (1.0 - p * q);
        nlam[um] = l1;
        nmu[um] = B + q * l1;
      });
      std::swap(lam, nlam);
      std::swap(mu, nmu);
      emit(k1, lam, mu);
    }
  }

  for (std::size_t idx = 0; idx < out.lambda.size(); ++idx) {
    if (!(out.lambda[idx] * out.mu[idx] > 0.0)) {
      const int i = static_cast<int>(idx % static_cast<std::size_t>(grid.nx));
      const int j = static_cast<int>(idx / static_cast<std::size_t>(grid.nx));
      throw Error(ErrorCode::SignLoss, "lambda mu <= 0 at node (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
  return out;
}

namespace {

template <class Coef>
PdeResidual residual_impl(const MetricField& f, Coef coef) {
  const GridSpec& g = f.grid;
  PdeResidual r;
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      const auto [cx, cy] = coef(s_of(x, y), t_of(x, y));
      const double dmu_dx = (f.m(i + 1, j) - f.m(i - 1, j)) / (2.0 * g.h);
      const double dlam_dy = (f.lam(i, j + 1) - f.lam(i, j - 1)) / (2.0 * g.step_y());
      r.r1 = std::max(r.r1, std::fabs(dmu_dx - f.lam(i, j) * cx));
      r.r2 = std::max(r.r2, std::fabs(dlam_dy + f.m(i, j) * cy));
    }
  }
  return r;
}

}  // namespace

PdeResidual pde_residual(const MetricField& field, const AngleFunction& psi) {
  // d_x theta2 = (psi1' - psi2')/2, d_y theta2 = (psi1' + psi2')/2.
  return residual_impl(field, [&](double s, double t) {
    const double d1 = psi.psi1.derivative(s), d2 = psi.psi2.derivative(t);
    return std::pair{0.5 * (d1 - d2), 0.5 * (d1 + d2)};
  });
}

PdeResidual pde_residual_alt(const MetricField& field, const AngleFunction& psi) {
  // Finite differences of theta1 in the transverse direction.
  const double e = 1e-5;
  return residual_impl(field, [&](double s, double t) {
    auto th1 = [&](double x, double y) { return psi.theta1(s_of(x, y), t_of(x, y)); };
    const double x = 0.5 * (s + t), y = 0.5 * (s - t);
    const double dy_th1 = (th1(x, y + e) - th1(x, y - e)) / (2.0 * e);
    const double dx_th1 = (th1(x + e, y) - th1(x - e, y)) / (2.0 * e);
    return std::pair{dy_th1, dx_th1};
  });
}

std::pair<double, double> mean_curvature_coeffs(double lambda, double mu, double theta2) {
  if (!(lambda * mu > 0.0)) throw Error(ErrorCode::SignLoss, "lambda mu <= 0");
  const double c = std::cos(theta2), s = std::sin(theta2);
  return {c / mu - s / lambda, s / mu + c / lambda};
}

MeanCurvature mean_curvature_coeffs(const MetricField& field, const AngleFunction& psi) {
  const GridSpec& g = field.grid;
  MeanCurvature r{std::vector<double>(g.size()), std::vector<double>(g.size())};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double th2 = psi.theta2(s_of(g.x(i), g.y(j)), t_of(g.x(i), g.y(j)));
      const auto [h0, h1] = mean_curvature_coeffs(field.lam(i, j), field.m(i, j), th2);
      r.h0[g.index(i, j)] = h0;
      r.h1[g.index(i, j)] = h1;
    }
  }
  return r;
}

std::string metric_csv(const MetricField& field) {
  std::ostringstream os;
  os << "x,y,lambda,mu\n";
  const GridSpec& g = field.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      os << fmt17(g.x(i)) << ',' << fmt17(g.y(j)) << ',' << fmt17(field.lam(i, j)) << ',' << fmt17(field.m(i, j)) << '\n';
  return os.str();
}

}  // namespace flatspin
