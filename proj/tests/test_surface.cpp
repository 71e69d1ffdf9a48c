#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flatspin/error.hpp"
#include "flatspin/surface.hpp"

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

MetricField constant_field(const GridSpec& g, double lam, double mu) {
  return {g, std::vector<double>(g.size(), lam), std::vector<double>(g.size(), mu)};
}

template <class Fn>
SurfacePatch sampled(const GridSpec& g, Fn f) {
  SurfacePatch p;
  p.grid = g;
  p.F.resize(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) p.F[g.index(i, j)] = f(g.x(i), g.y(j));
  return p;
}

Quat random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Quat{n(rng), n(rng), n(rng), n(rng)}.normalized();
}

}  // namespace

TEST_CASE("dual coframe examples") {
  const GridSpec g{0.0, 0.0, 0.1, 1, 1};
  const AngleFunction a{Fourier::constant(0.75 * pi), Fourier::constant(0.75 * pi)};
  const MetricField fa = constant_field(g, -std::sqrt(2.0), -std::sqrt(2.0));
  const CoframeField w = dual_coframe(a, fa);
  CHECK(w.w2x[0] == doctest::Approx(-1.0));
  CHECK(w.w2y[0] == doctest::Approx(1.0));
  CHECK(w.w3x[0] == doctest::Approx(-1.0));
  CHECK(w.w3y[0] == doctest::Approx(-1.0));
  CHECK(coframe_duality_residual(w, a, fa) <= 1e-15);

  const AngleFunction b{Fourier::constant(0.0), Fourier::constant(0.0)};
  const CoframeField wb = dual_coframe(b, constant_field(g, 1.0, 1.0));
  CHECK(wb.w2x[0] == 0.0);
  CHECK(wb.w2y[0] == 1.0);
  CHECK(wb.w3x[0] == -1.0);
  CHECK(wb.w3y[0] == 0.0);

  CHECK(code_of([&] { dual_coframe(b, constant_field(g, 1.0, -1.0)); }) == ErrorCode::SignLoss);
}

TEST_CASE("xi at the identity spinor") {
  const GridSpec g{0.0, 0.0, 0.1, 2, 2};
  const AngleFunction psi{Fourier::constant(0.5 * pi), Fourier::constant(0.5 * pi)};
  const XiField xi = assemble_xi([](double, double) { return Spinor(); }, dual_coframe(psi, constant_field(g, 1.0, 1.0)));
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(norm(xi.xi_x[k] - Vec4{{0.0, 0.0, 1.0, 0.0}}) <= 1e-15);
    CHECK(norm(xi.xi_y[k] - Vec4{{0.0, 0.0, 0.0, 1.0}}) <= 1e-15);
    CHECK(xi.e0[k] == Vec4{{1.0, 0.0, 0.0, 0.0}});
    CHECK(xi.e1[k] == Vec4{{0.0, 1.0, 0.0, 0.0}});
  }
}

TEST_CASE("xi is an orthogonal coframe for random spinors") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const GridSpec g{0.0, 0.0, 0.1, 1, 1};
  for (int trial = 0; trial < 200; ++trial) {
    const Spinor sp = Spinor::from_pair(random_unit(rng), random_unit(rng));
    const AngleFunction psi{Fourier::constant(u(rng)), Fourier::constant(u(rng))};
    const double lam = u(rng), mu = lam > 0 ? std::fabs(u(rng)) + 0.1 : -std::fabs(u(rng)) - 0.1;
    const XiField xi = assemble_xi([&](double, double) { return sp; }, dual_coframe(psi, constant_field(g, lam, mu)));
    CHECK(xi.membership_residual <= 1e-14);
    CHECK(dot(xi.xi_x[0], xi.xi_x[0]) == doctest::Approx(lam * lam).epsilon(1e-12));
    CHECK(dot(xi.xi_y[0], xi.xi_y[0]) == doctest::Approx(mu * mu).epsilon(1e-12));
    CHECK(std::fabs(dot(xi.xi_x[0], xi.xi_y[0])) <= 1e-12 * (1.0 + lam * lam + mu * mu));
    // The normal images are orthonormal and orthogonal to the tangent plane.
    const Vec4 &e0 = xi.e0[0], &e1 = xi.e1[0];
    CHECK(dot(e0, e0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dot(e1, e1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(dot(e0, e1)) <= 1e-12);
    CHECK(std::fabs(dot(e0, xi.xi_x[0])) <= 1e-12 * (1.0 + std::fabs(lam)));
    CHECK(std::fabs(dot(e1, xi.xi_y[0])) <= 1e-12 * (1.0 + std::fabs(mu)));
  }
}

TEST_CASE("constant xi integrates to an affine map") {
  const GridSpec g{0.3, -0.2, 0.05, 12, 9};
  XiField xi{g, std::vector<Vec4>(g.size(), Vec4{{1.0, 2.0, 0.0, -1.0}}), std::vector<Vec4>(g.size(), Vec4{{0.0, 0.5, 3.0, 0.0}}), {}, {}, 0.0};
  const SurfacePatch p = integrate_xi(xi);
  CHECK(p.closedness <= 1e-12);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec4 expect = (i * g.h) * Vec4{{1.0, 2.0, 0.0, -1.0}} + (j * g.h) * Vec4{{0.0, 0.5, 3.0, 0.0}};
      CHECK(norm(p.at(i, j) - expect) <= 1e-13);
    }
  const SurfacePatch q = integrate_xi_columns_first(xi);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(norm(p.F[k] - q.F[k]) <= 1e-13);
}

TEST_CASE("non-closed xi is detected") {
  const GridSpec g{0.0, 0.0, 0.1, 8, 8};
  XiField xi{g, std::vector<Vec4>(g.size()), std::vector<Vec4>(g.size()), {}, {}, 0.0};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) xi.xi_x[g.index(i, j)] = Vec4{{g.y(j), 0.0, 0.0, 0.0}};
  // d(y dx) = -dx ^ dy, so every plaquette loop is minus its area.
  CHECK(closedness_residual(xi) == doctest::Approx(1.0).epsilon(1e-12));
  const SurfacePatch a = integrate_xi(xi), b = integrate_xi_columns_first(xi);
  CHECK(norm(a.at(7, 7) - b.at(7, 7)) == doctest::Approx(0.49).epsilon(1e-12));
}

TEST_CASE("fundamental forms of known surfaces") {
  SUBCASE("round sphere") {
    const double h = 2.0 * pi / 128;
    const GridSpec g{0.0, -0.5, h, 40, 17};
    const SurfacePatch p = sampled(g, [](double x, double y) {
      return Vec4{{std::cos(y) * std::cos(x), std::cos(y) * std::sin(x), std::sin(y), 0.0}};
    });
    const FundForms ff = estimate_fundamental_forms(p);
    int valid = 0;
    for (const auto& s : ff.samples) {
      if (!s.valid) continue;
      ++valid;
      CHECK(std::fabs(s.K - 1.0) <= 5e-3);
      CHECK(std::fabs(s.KN) <= 1e-8);
    }
    CHECK(valid == 36 * 13);
  }
  SUBCASE("plane") {
    const GridSpec g{0.0, 0.0, 0.1, 9, 9};
    const FundForms ff = estimate_fundamental_forms(sampled(g, [](double x, double y) { return Vec4{{x + y, 2.0 * y, 1.0, -x}}; }));
    CHECK(ff.max_abs_K <= 1e-10);
    CHECK(ff.max_abs_KN <= 1e-10);
  }
  SUBCASE("complex curve w = z^2") {
    // At the origin: B(dx,dx) = 2 e2, B(dx,dy) = 2 e3, B(dy,dy) = -2 e2, so K = -8 and K_N = 8.
    const GridSpec g{-0.4, -0.4, 0.1, 9, 9};
    const SurfacePatch p = sampled(g, [](double x, double y) { return Vec4{{x, y, x * x - y * y, 2.0 * x * y}}; });
    const FundForms ff = estimate_fundamental_forms(p);
    const FundFormSample& s = ff.samples[g.index(4, 4)];
    CHECK(s.valid);
    CHECK(s.K == doctest::Approx(-8.0).epsilon(1e-10));
    CHECK(s.KN == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(s.E == doctest::Approx(1.0));
    CHECK(s.G == doctest::Approx(1.0));
  }
  SUBCASE("Clifford torus with periodic wrap") {
    const int n = 64;
    const double h = 2.0 * pi / n;
    SurfacePatch p = sampled(GridSpec{0.0, 0.0, h, n, n}, [](double x, double y) {
      return (1.0 / std::sqrt(2.0)) * Vec4{{std::cos(x), std::sin(x), std::cos(y), std::sin(y)}};
    });
    p.periodic_x = p.periodic_y = true;
    const FundForms ff = estimate_fundamental_forms(p);
    for (const auto& s : ff.samples) CHECK(s.valid);
    CHECK(ff.max_abs_K <= 1e-4);
    CHECK(ff.max_abs_KN <= 1e-4);
  }
  SUBCASE("degenerate tangent") {
    const GridSpec g{0.0, 0.0, 0.1, 6, 6};
    CHECK(code_of([&] { estimate_fundamental_forms(sampled(g, [](double x, double y) { return Vec4{{x + y, x + y, 0.0, 0.0}}; })); }) ==
          ErrorCode::DegenerateTangent);
  }
}

TEST_CASE("flat patch from torus data") {
  const AngleFunction psi = fourier_psi();
  const int n = 128;
  const double h = 2.0 * pi / n;
  const LiftPath lift = integrate_lift(psi, n, n, Spinor());
  const GridSpec g{0.0, 0.0, h, n / 2 + 1, n / 2 + 1};
  const PatchResult r = synthesize_patch(psi, lift, torus_metric_field(psi, g));
  CHECK(r.report.membership <= 1e-14);
  CHECK(r.report.closedness <= 0.2 * h * h);
  CHECK(r.report.max_abs_K <= 1e-4);
  CHECK(r.report.max_abs_KN <= 1e-4);
  CHECK(r.report.metric_residual <= 1e-4);
  CHECK(r.report.second_form_residual <= 1e-4);
  CHECK(r.report.conformality <= 1e-12);
  CHECK(r.report.path_difference <= 1e-5);

  // Mean curvature vector from the coefficients matches the second form trace.
  const MeanCurvature mc = mean_curvature_coeffs(r.field, psi);
  PatchDerivatives d;
  REQUIRE(patch_derivatives(r.patch, 20, 30, d));
  const std::size_t k = g.index(20, 30);
  const double lam = r.field.lambda[k], mu = r.field.mu[k];
  const double th2 = psi.theta2(s_of(g.x(20), g.y(30)), t_of(g.x(20), g.y(30)));
  const Vec4 u0 = std::cos(th2) * r.patch.e0[k] + std::sin(th2) * r.patch.e1[k];
  const Vec4 u1 = -std::sin(th2) * r.patch.e0[k] + std::cos(th2) * r.patch.e1[k];
  const Vec4 trace = (1.0 / lam) * u1 + (1.0 / mu) * u0;
  const Vec4 fromh = mc.h0[k] * r.patch.e0[k] + mc.h1[k] * r.patch.e1[k];
  CHECK(norm(trace - fromh) <= 1e-12);
}

TEST_CASE("closedness converges at second order") {
  const AngleFunction psi = fourier_psi();
  double prev = 0.0;
  for (int n : {64, 128, 256}) {
    const double h = 2.0 * pi / n;
    const LiftPath lift = integrate_lift(psi, n, n, Spinor());
    const GridSpec g{0.0, 0.0, h, n / 4 + 1, n / 4 + 1};
    const XiField xi = assemble_xi(lift, dual_coframe(psi, torus_metric_field(psi, g)));
    const double c = closedness_residual(xi);
    CHECK(c <= 0.2 * h * h);
    if (prev > 0.0) CHECK(std::log2(prev / c) == doctest::Approx(2.0).epsilon(0.1));
    prev = c;
  }
}

TEST_CASE("wrong metric breaks the structure") {
  const AngleFunction psi = fourier_psi();
  const int n = 128;
  const double h = 2.0 * pi / n;
  const LiftPath lift = integrate_lift(psi, n, n, Spinor());
  const GridSpec g{0.0, 0.0, h, 33, 33};
  MetricField f = torus_metric_field(psi, g);
  for (double& l : f.lambda) l *= 2.0;
  const XiField xi = assemble_xi(lift, dual_coframe(psi, f));
  CHECK(closedness_residual(xi) >= 0.1);
  const PatchResult r = synthesize_patch(psi, lift, f);
  CHECK(r.report.second_form_residual >= 0.1);
  CHECK(r.report.max_abs_KN + r.report.max_abs_K >= 1e-2);
}

TEST_CASE("grid checks") {
  const AngleFunction psi = fourier_psi();
  const LiftPath lift = integrate_lift(psi, 64, 64, Spinor());
  const double h = 2.0 * pi / 64;
  const GridSpec off{0.5 * h, 0.0, h, 4, 4};
  CHECK(code_of([&] { assemble_xi(lift, dual_coframe(psi, torus_metric_field(psi, off))); }) == ErrorCode::GridMismatch);
  const GridSpec g{0.0, 0.0, h, 8, 8};
  SurfacePatch p = integrate_xi(assemble_xi(lift, dual_coframe(psi, torus_metric_field(psi, g))));
  CHECK(code_of([&] { metric_residual(p, torus_metric_field(psi, GridSpec{0.0, 0.0, h, 9, 8})); }) == ErrorCode::GridMismatch);
  p.e0.clear();
  CHECK(code_of([&] { check_second_form(p, torus_metric_field(psi, g), psi); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Gauss image conformality") {
  const AngleFunction psi = fourier_psi();
  const LiftPath lift = integrate_lift(psi, 256, 256, Spinor());
  const double h = 2.0 * pi / 256;
  const GridSpec g{0.0, 0.0, h, 40, 40};
  CHECK(gauss_conformality_residual([&](double s, double t) { return lift.at(s, t); }, g) <= 1e-12);
  // A plus factor depending on both s and t is not conformal.
  const auto mixed = [](double s, double t) { return Spinor::from_pair(exp_imag(0.0, 0.5 * (s + t), 0.0), Quat{1.0, 0.0, 0.0, 0.0}); };
  CHECK(gauss_conformality_residual(mixed, g) >= 0.1);
}

TEST_CASE("patch csv") {
  const GridSpec g{0.0, 0.0, 0.5, 3, 2};
  const std::string csv = patch_csv(sampled(g, [](double x, double y) { return Vec4{{x, y, 0.0, 1.0}}; }));
  CHECK(csv.rfind("x,y,F0,F1,F2,F3\n0,0,0,0,0,1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}
