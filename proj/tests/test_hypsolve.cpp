#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "flatspin/error.hpp"
#include "flatspin/hypsolve.hpp"

using namespace flatspin;
using std::numbers::pi;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

AngleFunction fourier_psi() { return {{2.0 * pi, 1.5 * pi, {{0.0, 0.3}}}, {2.0 * pi, 0.0, {{0.0, 0.2}}}}; }

// Square (x, y) patch [0, L]^2 at spacing h.
GridSpec square(double h, int nodes) { return {0.0, 0.0, h, nodes, nodes}; }

double torus_error(const AngleFunction& psi, int n) {
  const CauchyData d = torus_cauchy_data(psi, n);
  const GridSpec g = square(d.h, n / 2 + 1);
  const MetricField f = solve_cauchy(psi, d, g);
  const MetricField exact = torus_metric_field(psi, g);
  double e = 0.0;
  for (std::size_t k = 0; k < f.lambda.size(); ++k)
    e = std::max({e, std::fabs(f.lambda[k] - exact.lambda[k]), std::fabs(f.mu[k] - exact.mu[k])});
  return e;
}

CauchyData generic_data(int n, double len) {
  CauchyData d;
  d.h = len / n;
  for (int j = 0; j <= n; ++j) {
    const double t = j * d.h;
    d.lambda0.push_back(-1.5 + 0.2 * std::sin(t) + 0.1 * std::cos(2.0 * t));
    d.mu0.push_back(-1.0 - 0.3 * std::cos(t));
  }
  return d;
}

}  // namespace

TEST_CASE("constant angle keeps constant data") {
  const AngleFunction psi{Fourier::constant(1.5 * pi), Fourier::constant(0.0)};
  CauchyData d;
  d.h = 2.0 * pi / 64;
  d.periodic = true;
  d.lambda0.assign(65, -1.2);
  d.mu0.assign(65, -0.7);
  const MetricField f = solve_cauchy(psi, d, GridSpec{pi / 2, 0.0, d.h, 33, 16});
  for (std::size_t k = 0; k < f.lambda.size(); ++k) {
    CHECK(f.lambda[k] == -1.2);
    CHECK(f.mu[k] == -0.7);
  }
  const auto r = pde_residual(f, psi);
  CHECK(r.r1 == 0.0);
  CHECK(r.r2 == 0.0);
}

TEST_CASE("torus data reproduces the closed-form field") {
  const AngleFunction psi = fourier_psi();
  const double e64 = torus_error(psi, 64), e128 = torus_error(psi, 128), e256 = torus_error(psi, 256);
  const double h256 = 2.0 * pi / 256;
  CHECK(e256 <= 5.0 * h256 * h256);
  const double o1 = std::log2(e64 / e128), o2 = std::log2(e128 / e256);
  CHECK(o1 >= 1.7);
  CHECK(o1 <= 2.3);
  CHECK(o2 >= 1.7);
  CHECK(o2 <= 2.3);

  const CauchyData d = torus_cauchy_data(psi, 128);
  const GridSpec g = square(d.h, 65);
  CHECK_NOTHROW(solve_cauchy(psi, d, g));
  CHECK(pde_residual(torus_metric_field(psi, g), psi).r1 <= 2.0 * d.h * d.h);
}

TEST_CASE("backward marching and negative s") {
  const AngleFunction psi = fourier_psi();
  const CauchyData d = torus_cauchy_data(psi, 256);
  const GridSpec g{-1.0 * 32 * d.h, -1.0 * 16 * d.h, d.h, 40, 40};
  const MetricField f = solve_cauchy(psi, d, g);
  const MetricField exact = torus_metric_field(psi, g);
  double e = 0.0;
  for (std::size_t k = 0; k < f.lambda.size(); ++k) e = std::max(e, std::fabs(f.lambda[k] - exact.lambda[k]));
  CHECK(e <= 5.0 * d.h * d.h);
}

TEST_CASE("self-convergence for generic data") {
  const AngleFunction psi{{2.0 * pi, 1.5 * pi, {{0.1, 0.3}, {0.05, 0.0}}}, {2.0 * pi, 0.2, {{0.0, 0.2}}}};
  const double len = 2.0;
  const int nref = 1024;
  const CauchyData dref = generic_data(nref, len);
  // Whole determinacy rectangle of the data segment: x in [0, len/2], y in [-len/2, 0].
  auto patch = [&](int n) {
    const double h = len / n;
    return GridSpec{0.0, -0.5 * len, h, n / 2 + 1, n / 2 + 1};
  };
  const MetricField ref = solve_cauchy(psi, dref, patch(nref));
  double errs[3];
  int idx = 0;
  for (int n : {64, 128, 256}) {
    const MetricField f = solve_cauchy(psi, generic_data(n, len), patch(n));
    const int stride = nref / n;
    double e = 0.0;
    for (int j = 0; j < f.grid.ny; ++j)
      for (int i = 0; i < f.grid.nx; ++i)
        e = std::max({e, std::fabs(f.lam(i, j) - ref.lam(i * stride, j * stride)), std::fabs(f.m(i, j) - ref.m(i * stride, j * stride))});
    errs[idx++] = e;
  }
  for (int k = 0; k < 2; ++k) {
    const double order = std::log2(errs[k] / errs[k + 1]);
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);
  }
}

TEST_CASE("domain of dependence") {
  const AngleFunction psi = fourier_psi();
  const int n = 128;
  const CauchyData d = generic_data(n, 2.0);
  // Node with s = 8h, t = 64h depends on data samples 56..72 only.
  const double h = d.h;
  const GridSpec node{(64 + 8) * h / 2.0, (8 - 64) * h / 2.0, h, 1, 1};
  const MetricField base = solve_cauchy(psi, d, node);
  CauchyData far = d;
  for (int j = 0; j <= n; ++j) {
    if (j < 56 || j > 72) far.lambda0[static_cast<std::size_t>(j)] *= 1.3;
  }
  const MetricField moved = solve_cauchy(psi, far, node);
  CHECK(moved.lambda[0] == base.lambda[0]);
  CHECK(moved.mu[0] == base.mu[0]);
  CauchyData near = d;
  near.lambda0[60] *= 1.3;
  CHECK(solve_cauchy(psi, near, node).lambda[0] != base.lambda[0]);
}

TEST_CASE("solver errors") {
  const AngleFunction psi = fourier_psi();
  const CauchyData d = generic_data(64, 2.0);
  CHECK(code_of([&] { solve_cauchy(psi, d, GridSpec{0.0, 0.0, d.h, 33, 1}); }) == ErrorCode::Ok);
  CHECK(code_of([&] { solve_cauchy(psi, d, GridSpec{0.0, 0.0, d.h, 33, 2}); }) == ErrorCode::DomainError);
  CHECK(code_of([&] { solve_cauchy(psi, d, GridSpec{0.0, 0.0, d.h * 0.5, 4, 4}); }) == ErrorCode::GridMismatch);
  CHECK(code_of([&] { solve_cauchy(psi, d, GridSpec{0.3 * d.h, 0.0, d.h, 4, 1}); }) == ErrorCode::GridMismatch);

  CauchyData bad = d;
  bad.mu0[5] = 1.0;
  CHECK(code_of([&] { solve_cauchy(psi, bad, GridSpec{0.0, 0.0, d.h, 4, 1}); }) == ErrorCode::SignLoss);

  // Strong coupling drives lambda through zero.
  const AngleFunction steep{{2.0 * pi, 0.0, {{0.0, 3.0}}}, Fourier::constant(0.0)};
  CauchyData small;
  small.h = 2.0 * pi / 256;
  small.periodic = true;
  small.lambda0.assign(257, 0.05);
  small.mu0.assign(257, 1.0);
  CHECK(code_of([&] { solve_cauchy(steep, small, GridSpec{0.0, 0.0, small.h, 1, 64}); }) == ErrorCode::SignLoss);
}

TEST_CASE("pde residual") {
  const AngleFunction psi = fourier_psi();
  double prev = 0.0;
  for (int n : {64, 128, 256}) {
    const double h = 2.0 * pi / n;
    const MetricField f = torus_metric_field(psi, square(h, n / 2));
    const auto r = pde_residual(f, psi);
    const auto ra = pde_residual_alt(f, psi);
    const double m = std::max(r.r1, r.r2);
    CHECK(m <= 2.0 * h * h);
    CHECK(std::fabs(ra.r1 - r.r1) <= 2.0 * h * h);
    CHECK(std::fabs(ra.r2 - r.r2) <= 2.0 * h * h);
    if (prev > 0.0) CHECK(std::log2(prev / m) >= 1.7);
    prev = m;
  }

  const double h = 2.0 * pi / 128;
  MetricField f = torus_metric_field(psi, square(h, 64));
  const double before = pde_residual(f, psi).r2;
  f.lambda[f.grid.index(30, 30)] += 0.01;
  CHECK(pde_residual(f, psi).r2 >= 0.01 / (2.0 * h) * (1.0 - 1e-3) - before);
}

TEST_CASE("mean curvature coefficients") {
  const auto [h0, h1] = mean_curvature_coeffs(-std::sqrt(2.0), -std::sqrt(2.0), 0.75 * pi);
  CHECK(h0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::fabs(h1) <= 1e-15);
  const auto [a0, a1] = mean_curvature_coeffs(0.8, 1.6, 0.0);
  CHECK(a0 == doctest::Approx(1.0 / 1.6));
  CHECK(a1 == doctest::Approx(1.0 / 0.8));
  for (double th : {0.3, 1.9, 2.5, 4.0}) {
    const double lam = -1.3, mu = -0.4;
    const auto [b0, b1] = mean_curvature_coeffs(lam, mu, th);
    const double c = std::cos(th), s = std::sin(th);
    CHECK(std::fabs(c * b0 + s * b1 - 1.0 / mu) <= 1e-12);
    CHECK(std::fabs(-s * b0 + c * b1 - 1.0 / lam) <= 1e-12);
  }
  CHECK(code_of([] { mean_curvature_coeffs(1.0, -1.0, 0.0); }) == ErrorCode::SignLoss);

  const AngleFunction psi{Fourier::constant(1.5 * pi), Fourier::constant(0.0)};
  const MeanCurvature mc = mean_curvature_coeffs(torus_metric_field(psi, square(0.1, 8)), psi);
  for (std::size_t k = 0; k < mc.h0.size(); ++k) {
    CHECK(mc.h0[k] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::fabs(mc.h1[k]) <= 1e-14);
  }
}

TEST_CASE("metric csv") {
  const AngleFunction psi{Fourier::constant(1.5 * pi), Fourier::constant(0.0)};
  const std::string csv = metric_csv(torus_metric_field(psi, square(0.1, 4)));
  CHECK(csv.rfind("x,y,lambda,mu\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
}
