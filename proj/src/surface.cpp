#include "flatspin/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "flatspin/error.hpp"
#include "flatspin/format.hpp"
#include "flatspin/parallel.hpp"

namespace flatspin {

CoframeField dual_coframe(const AngleFunction& psi, const MetricField& field) {
  const GridSpec& g = field.grid;
  CoframeField w{g, std::vector<double>(g.size()), std::vector<double>(g.size()), std::vector<double>(g.size()),
                 std::vector<double>(g.size())};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double lam = field.lambda[k], mu = field.mu[k];
      if (!(lam * mu > 0.0)) throw Error(ErrorCode::SignLoss, "lambda mu <= 0 at node (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      const double th1 = psi.theta1(s_of(g.x(i), g.y(j)), t_of(g.x(i), g.y(j)));
      const double c = std::cos(th1), s = std::sin(th1);
      w.w2x[k] = lam * s;
      w.w2y[k] = mu * c;
      w.w3x[k] = -lam * c;
      w.w3y[k] = mu * s;
    }
  }
  return w;
}

double coframe_duality_residual(const CoframeField& w, const AngleFunction& psi, const MetricField& field) {
  const GridSpec& g = field.grid;
  double r = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double th1 = psi.theta1(s_of(g.x(i), g.y(j)), t_of(g.x(i), g.y(j)));
      const double lam = field.lambda[k], mu = field.mu[k];
      const double e2[2] = {std::sin(th1) / lam, std::cos(th1) / mu};
      const double e3[2] = {-std::cos(th1) / lam, std::sin(th1) / mu};
      const double w2e2 = w.w2x[k] * e2[0] + w.w2y[k] * e2[1];
      const double w2e3 = w.w2x[k] * e3[0] + w.w2y[k] * e3[1];
      const double w3e2 = w.w3x[k] * e2[0] + w.w3y[k] * e2[1];
      const double w3e3 = w.w3x[k] * e3[0] + w.w3y[k] * e3[1];
      r = std::max({r, std::fabs(w2e2 - 1.0), std::fabs(w2e3), std::fabs(w3e2), std::fabs(w3e3 - 1.0)});
    }
  }
  return r;
}

XiField assemble_xi(const SpinorField& gfun, const CoframeField& w) {
  const GridSpec& g = w.grid;
  XiField xi{g, std::vector<Vec4>(g.size()), std::vector<Vec4>(g.size()), std::vector<Vec4>(g.size()),
             std::vector<Vec4>(g.size()), 0.0};
  std::vector<double> resid(static_cast<std::size_t>(g.ny), 0.0);
  parallel_for(g.ny, [&](int j) {
    double r = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const Spinor sp = gfun(s_of(g.x(i), g.y(j)), t_of(g.x(i), g.y(j)));
      const SplitQuat gb = sp.value().bar();
      const SplitQuat gh = sp.value().hat();
      const SplitQuat ax = gb * SplitQuat{0.0, 0.0, w.w2x[k], w.w3x[k]} * gh;
      const SplitQuat ay = gb * SplitQuat{0.0, 0.0, w.w2y[k], w.w3y[k]} * gh;
      const SplitQuat n0 = gb * SplitQuat(kSigma) * gh;
      const SplitQuat n1 = gb * kI * gh;
      r = std::max({r, r4_membership_residual(ax), r4_membership_residual(ay)});
      xi.xi_x[k] = Vec4::from_embedded(ax);
      xi.xi_y[k] = Vec4::from_embedded(ay);
      xi.e0[k] = Vec4::from_embedded(n0);
      xi.e1[k] = Vec4::from_embedded(n1);
    }
    resid[static_cast<std::size_t>(j)] = r;
  });
  xi.membership_residual = *std::max_element(resid.begin(), resid.end());
  return xi;
}

XiField assemble_xi(const LiftPath& lift, const CoframeField& coframe) {
  const GridSpec& g = coframe.grid;
  auto aligned = [](double a, double h) {
    const double u = a / h;
    return std::fabs(u - std::round(u)) <= 1e-9;
  };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!aligned(s_of(g.x(i), g.y(j)), lift.g1.h) || !aligned(t_of(g.x(i), g.y(j)), lift.g2.h))
        throw Error(ErrorCode::GridMismatch, "node (" + std::to_string(i) + ", " + std::to_string(j) + ") misses the lift samples");
    }
  }
  return assemble_xi([&](double s, double t) { return lift.at(s, t); }, coframe);
}

namespace {

Vec4 trap(const Vec4& a, const Vec4& b, double h) { return (0.5 * h) * (a + b); }

SurfacePatch start_patch(const XiField& xi) {
  SurfacePatch p;
  p.grid = xi.grid;
  p.F.assign(xi.grid.size(), Vec4{});
  p.e0 = xi.e0;
  p.e1 = xi.e1;
  p.closedness = closedness_residual(xi);
  return p;
}

}  // namespace

double closedness_residual(const XiField& xi) {
  const GridSpec& g = xi.grid;
  const double hx = g.step_x(), hy = g.step_y();
  double r = 0.0;
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const Vec4 loop = trap(xi.xi_x[g.index(i, j)], xi.xi_x[g.index(i + 1, j)], hx) +
                        trap(xi.xi_y[g.index(i + 1, j)], xi.xi_y[g.index(i + 1, j + 1)], hy) -
                        trap(xi.xi_x[g.index(i, j + 1)], xi.xi_x[g.index(i + 1, j + 1)], hx) -
                        trap(xi.xi_y[g.index(i, j)], xi.xi_y[g.index(i, j + 1)], hy);
      r = std::max(r, norm(loop) / (hx * hy));
    }
  }
  return r;
}

namespace {

// Cumulative integral along a line of n samples: cubic through four neighbours per interval.
template <class Get, class Put>
void cumulative(int n, double h, Get f, Put put, const Vec4& start) {
  Vec4 acc = start;
  put(0, acc);
  for (int i = 0; i + 1 < n; ++i) {
    Vec4 inc;
    if (n < 4) {
      inc = trap(f(i), f(i + 1), h);
    } else if (i == 0) {
      inc = (h / 24.0) * (9.0 * f(0) + 19.0 * f(1) - 5.0 * f(2) + f(3));
    } else if (i + 2 == n) {
      inc = (h / 24.0) * (f(n - 4) - 5.0 * f(n - 3) + 19.0 * f(n - 2) + 9.0 * f(n - 1));
    } else {
      inc = (h / 24.0) * (-1.0 * f(i - 1) + 13.0 * f(i) + 13.0 * f(i + 1) - f(i + 2));
    }
    acc = acc + inc;
    put(i + 1, acc);
  }
}

}  // namespace

SurfacePatch integrate_xi(const XiField& xi) {
  SurfacePatch p = start_patch(xi);
  const GridSpec& g = xi.grid;
  cumulative(
      g.nx, g.step_x(), [&](int i) { return xi.xi_x[g.index(i, 0)]; }, [&](int i, const Vec4& v) { p.F[g.index(i, 0)] = v; },
      Vec4{});
  parallel_for(g.nx, [&](int i) {
    cumulative(
        g.ny, g.step_y(), [&](int j) { return xi.xi_y[g.index(i, j)]; },
        [&](int j, const Vec4& v) { p.F[g.index(i, j)] = v; }, p.F[g.index(i, 0)]);
  });
  return p;
}

SurfacePatch integrate_xi_columns_first(const XiField& xi) {
  SurfacePatch p = start_patch(xi);
  const GridSpec& g = xi.grid;
  cumulative(
      g.ny, g.step_y(), [&](int j) { return xi.xi_y[g.index(0, j)]; }, [&](int j, const Vec4& v) { p.F[g.index(0, j)] = v; },
      Vec4{});
  parallel_for(g.ny, [&](int j) {
    cumulative(
        g.nx, g.step_x(), [&](int i) { return xi.xi_x[g.index(i, j)]; },
        [&](int i, const Vec4& v) { p.F[g.index(i, j)] = v; }, p.F[g.index(0, j)]);
  });
  return p;
}

bool patch_derivatives(const SurfacePatch& patch, int i, int j, PatchDerivatives& d) {
  const GridSpec& g = patch.grid;
  auto idx = [](int v, int n, bool periodic, bool& ok) {
    if (v >= 0 && v < n) return v;
    if (!periodic) {
      ok = false;
      return 0;
    }
    return ((v % n) + n) % n;
  };
  bool ok = true;
  std::array<int, 5> ii{}, jj{};
  for (int a = -2; a <= 2; ++a) {
    ii[static_cast<std::size_t>(a + 2)] = idx(i + a, g.nx, patch.periodic_x, ok);
    jj[static_cast<std::size_t>(a + 2)] = idx(j + a, g.ny, patch.periodic_y, ok);
  }
  if (!ok) return false;
  auto F = [&](int a, int b) { return patch.F[g.index(ii[static_cast<std::size_t>(a + 2)], jj[static_cast<std::size_t>(b + 2)])]; };
  const double hx = g.step_x(), hy = g.step_y();
  static constexpr double c1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  static constexpr double c2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  d = PatchDerivatives{};
  for (int a = -2; a <= 2; ++a) {
    const auto ua = static_cast<std::size_t>(a + 2);
    d.Fx = d.Fx + (c1[ua] / hx) * F(a, 0);
    d.Fy = d.Fy + (c1[ua] / hy) * F(0, a);
    d.Fxx = d.Fxx + (c2[ua] / (hx * hx)) * F(a, 0);
    d.Fyy = d.Fyy + (c2[ua] / (hy * hy)) * F(0, a);
    for (int b = -2; b <= 2; ++b) {
      const double w = c1[ua] * c1[static_cast<std::size_t>(b + 2)];
      if (w != 0.0) d.Fxy = d.Fxy + (w / (hx * hy)) * F(a, b);
    }
  }
  return true;
}

namespace {

double det4(const std::array<Vec4, 4>& c) {
  // Laplace expansion on 2x2 minors of the first two columns.
  auto m = [&](int r1, int r2, int a, int b) { return c[static_cast<std::size_t>(a)][r1] * c[static_cast<std::size_t>(b)][r2] - c[static_cast<std::size_t>(a)][r2] * c[static_cast<std::size_t>(b)][r1]; };
  return m(0, 1, 0, 1) * m(2, 3, 2, 3) - m(0, 2, 0, 1) * m(1, 3, 2, 3) + m(0, 3, 0, 1) * m(1, 2, 2, 3) +
         m(1, 2, 0, 1) * m(0, 3, 2, 3) - m(1, 3, 0, 1) * m(0, 2, 2, 3) + m(2, 3, 0, 1) * m(0, 1, 2, 3);
}

Vec4 reject(Vec4 v, const Vec4& unit) { return v - dot(v, unit) * unit; }

struct TangentFrame {
  Vec4 t1, t2;
  double a11, a12, a22;
};

TangentFrame tangent_frame(const Vec4& Fx, const Vec4& Fy, int i, int j) {
  TangentFrame f;
  f.a11 = norm(Fx);
  if (f.a11 < 1e-12) throw Error(ErrorCode::DegenerateTangent, "vanishing x-derivative at node (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  f.t1 = (1.0 / f.a11) * Fx;
  f.a12 = dot(Fy, f.t1);
  const Vec4 w = Fy - f.a12 * f.t1;
  f.a22 = norm(w);
  if (f.a22 < 1e-10 * std::max(1.0, norm(Fy)))
    throw Error(ErrorCode::DegenerateTangent, "dependent tangent vectors at node (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  f.t2 = (1.0 / f.a22) * w;
  return f;
}

}  // namespace

FundForms estimate_fundamental_forms(const SurfacePatch& patch) {
  const GridSpec& g = patch.grid;
  if (g.nx < 5 || g.ny < 5) throw Error(ErrorCode::InvalidArgument, "fundamental forms need at least 5x5 nodes");
  FundForms out{g, std::vector<FundFormSample>(g.size()), 0.0, 0.0};
  parallel_for(g.ny, [&](int j) {
    for (int i = 0; i < g.nx; ++i) {
      PatchDerivatives d;
      if (!patch_derivatives(patch, i, j, d)) continue;
      FundFormSample& s = out.samples[g.index(i, j)];
      s.E = dot(d.Fx, d.Fx);
      s.F = dot(d.Fx, d.Fy);
      s.G = dot(d.Fy, d.Fy);
      const TangentFrame tf = tangent_frame(d.Fx, d.Fy, i, j);

      // Normal plane: orthonormalize the canonical basis against the tangent plane, largest first.
      std::array<Vec4, 2> n{};
      int found = 0;
      std::array<bool, 4> used{};
      while (found < 2) {
        int best = -1;
        double bestn = -1.0;
        Vec4 bestv{};
        for (int k = 0; k < 4; ++k) {
          if (used[static_cast<std::size_t>(k)]) continue;
          Vec4 e{};
          e[k] = 1.0;
          Vec4 v = reject(reject(e, tf.t1), tf.t2);
          for (int q = 0; q < found; ++q) v = reject(v, n[static_cast<std::size_t>(q)]);
          if (norm(v) > bestn) {
            bestn = norm(v);
            best = k;
            bestv = v;
          }
        }
        used[static_cast<std::size_t>(best)] = true;
        n[static_cast<std::size_t>(found++)] = (1.0 / bestn) * bestv;
      }
      if (det4({n[0], n[1], tf.t1, tf.t2}) < 0.0) n[1] = -1.0 * n[1];

      // B = P^-T II P^-1 with [Fx Fy] = [t1 t2] P, P = [[a11, a12], [0, a22]].
      const double p11 = 1.0 / tf.a11, p12 = -tf.a12 / (tf.a11 * tf.a22), p22 = 1.0 / tf.a22;
      double* outs[2] = {s.b0, s.b1};
      for (int k = 0; k < 2; ++k) {
        const double xx = dot(d.Fxx, n[static_cast<std::size_t>(k)]);
        const double xy = dot(d.Fxy, n[static_cast<std::size_t>(k)]);
        const double yy = dot(d.Fyy, n[static_cast<std::size_t>(k)]);
        outs[k][0] = p11 * p11 * xx;
        outs[k][1] = p11 * (p12 * xx + p22 * xy);
        outs[k][2] = p12 * p12 * xx + 2.0 * p12 * p22 * xy + p22 * p22 * yy;
      }
      const double a = s.b0[0], c = s.b0[1], b = s.b0[2];
      const double e = s.b1[0], gg = s.b1[1], f = s.b1[2];
      s.K = (a * b - c * c) + (e * f - gg * gg);
      s.KN = (a - b) * gg - (e - f) * c;
      s.valid = true;
    }
  });
  for (const auto& s : out.samples) {
    if (!s.valid) continue;
    out.max_abs_K = std::max(out.max_abs_K, std::fabs(s.K));
    out.max_abs_KN = std::max(out.max_abs_KN, std::fabs(s.KN));
  }
  return out;
}

namespace {

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (a.nx != b.nx || a.ny != b.ny || std::fabs(a.h - b.h) > 1e-12 * a.h || std::fabs(a.step_y() - b.step_y()) > 1e-12 * a.h ||
      std::fabs(a.x0 - b.x0) > 1e-12 || std::fabs(a.y0 - b.y0) > 1e-12)
    throw Error(ErrorCode::GridMismatch, "patch and metric field grids differ");
}

}  // namespace

double metric_residual(const SurfacePatch& patch, const MetricField& field) {
  require_same_grid(patch.grid, field.grid);
  const GridSpec& g = patch.grid;
  double r = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      PatchDerivatives d;
      if (!patch_derivatives(patch, i, j, d)) continue;
      const double lam = field.lam(i, j), mu = field.m(i, j);
      r = std::max({r, std::fabs(dot(d.Fx, d.Fx) - lam * lam), std::fabs(dot(d.Fy, d.Fy) - mu * mu), std::fabs(dot(d.Fx, d.Fy))});
    }
  }
  return r;
}

double check_second_form(const SurfacePatch& patch, const MetricField& field, const AngleFunction& psi) {
  require_same_grid(patch.grid, field.grid);
  if (patch.e0.size() != patch.F.size() || patch.e1.size() != patch.F.size())
    throw Error(ErrorCode::InvalidArgument, "second form check needs the normal frame of the patch");
  const GridSpec& g = patch.grid;
  double r = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      PatchDerivatives d;
      if (!patch_derivatives(patch, i, j, d)) continue;
      const TangentFrame tf = tangent_frame(d.Fx, d.Fy, i, j);
      auto normal = [&](const Vec4& v) { return reject(reject(v, tf.t1), tf.t2); };
      const double lam = field.lam(i, j), mu = field.m(i, j);
      const double th2 = psi.theta2(s_of(g.x(i), g.y(j)), t_of(g.x(i), g.y(j)));
      const double c = std::cos(th2), s = std::sin(th2);
      const Vec4& e0 = patch.e0[g.index(i, j)];
      const Vec4& e1 = patch.e1[g.index(i, j)];
      const Vec4 u0 = c * e0 + s * e1;
      const Vec4 u1 = -s * e0 + c * e1;
      const Vec4 b22 = (1.0 / (lam * lam)) * normal(d.Fxx);
      const Vec4 b33 = (1.0 / (mu * mu)) * normal(d.Fyy);
      const Vec4 b23 = (1.0 / (lam * mu)) * normal(d.Fxy);
      r = std::max({r, norm(b22 - (2.0 / lam) * u1), norm(b33 - (2.0 / mu) * u0), norm(b23)});
    }
  }
  return r;
}

double gauss_conformality_residual(const SpinorField& gfun, const GridSpec& g) {
  std::vector<SplitQuat> G(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Bivector b = hopf(gfun(s_of(g.x(i), g.y(j)), t_of(g.x(i), g.y(j))));
      G[g.index(i, j)] = SplitQuat{0.0, b.a, b.b, b.c};
    }
  double r = 0.0;
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      const SplitQuat dx = Lorentz{0.5 / g.step_x()} * (G[g.index(i + 1, j)] - G[g.index(i - 1, j)]);
      const SplitQuat dy = Lorentz{0.5 / g.step_y()} * (G[g.index(i, j + 1)] - G[g.index(i, j - 1)]);
      r = std::max(r, max_abs(dy - kSigma * dx));
    }
  }
  return r;
}

PatchResult synthesize_patch(const AngleFunction& psi, const LiftPath& lift, const MetricField& field) {
  PatchResult out;
  out.field = field;
  const CoframeField w = dual_coframe(psi, field);
  const XiField xi = assemble_xi(lift, w);
  out.patch = integrate_xi(xi);
  const SurfacePatch other = integrate_xi_columns_first(xi);
  PatchReport& r = out.report;
  r.closedness = out.patch.closedness;
  r.closedness_scaled = r.closedness / (field.grid.step_x() * field.grid.step_y());
  r.membership = xi.membership_residual;
  for (std::size_t k = 0; k < other.F.size(); ++k) r.path_difference = std::max(r.path_difference, norm(other.F[k] - out.patch.F[k]));
  const FundForms ff = estimate_fundamental_forms(out.patch);
  r.max_abs_K = ff.max_abs_K;
  r.max_abs_KN = ff.max_abs_KN;
  r.metric_residual = metric_residual(out.patch, field);
  r.second_form_residual = check_second_form(out.patch, field, psi);
  r.conformality = gauss_conformality_residual([&](double s, double t) { return lift.at(s, t); }, field.grid);
  return out;
}

std::string patch_csv(const SurfacePatch& patch) {
  std::ostringstream os;
  os << "x,y,F0,F1,F2,F3\n";
  const GridSpec& g = patch.grid;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec4& f = patch.at(i, j);
      os << fmt17(g.x(i)) << ',' << fmt17(g.y(j)) << ',' << fmt17(f[0]) << ',' << fmt17(f[1]) << ',' << fmt17(f[2]) << ','
         << fmt17(f[3]) << '\n';
    }
  }
  return os.str();
}

}  // namespace flatspin
