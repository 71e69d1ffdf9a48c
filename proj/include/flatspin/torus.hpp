#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flatspin/angle.hpp"
#include "flatspin/error.hpp"
#include "flatspin/lift.hpp"
#include "flatspin/surface.hpp"

namespace flatspin {

/// Lattice generators (m_i S, n_i T) in (s, t); rows are generators.
using Lattice = std::array<std::array<long, 2>, 2>;

struct TorusSpec {
  AngleFunction psi;
  Lattice lattice{{{1, 0}, {0, 1}}};
  std::optional<double> alpha;  // Kitagawa parameter override
};

struct TorusValidation {
  ErrorCode status = ErrorCode::Ok;
  std::string message;
  double psi1_min = 0.0, psi1_max = 0.0, psi2_min = 0.0, psi2_max = 0.0;
  double pad1 = 0.0, pad2 = 0.0;  // bounds on the gap between sampled and true extrema
  double theta2_min = 0.0, theta2_max = 0.0;
  long k = 0;  // (2k+1) pi < min psi1 - max psi2 <= max psi1 - min psi2 < 2(k+1) pi
  bool range_ok = false;
  long det = 0;
  bool lattice_ok = false;
  ClosureInfo closure1, closure2;
  Closure closure = Closure::Open;
  bool parity_ok = false;

  bool ok() const { return status == ErrorCode::Ok; }
};

/// Range, lattice, closure and parity checks, in that order; status holds the first failure.
/// The closure class comes from a lift with n samples per period.
TorusValidation validate_torus(const TorusSpec& spec, int n = 512);

/// Torus sampled on the (s, t) grid: node (i, j) at (i S/n1, j T/n2), periodic in both.
struct TorusPatch {
  TorusSpec spec;
  LiftPath lift;
  SurfacePatch patch;  // grid over (s, t), not (x, y)
  TorusValidation validation;

  /// conj(g1(s)) g2(t) at any parameter pair.
  Vec4 eval(double s, double t) const;
};

/// Throws the validation failure unless force is set.
TorusPatch build_torus(const TorusSpec& spec, int n1, int n2, bool force = false);

/// d/dx F = 2 sin th2 g^-1 (sin th1 J - cos th1 K) g^ and d/dy F = -2 cos th2 g^-1 (cos th1 J + sin th1 K) g^.
std::pair<Vec4, Vec4> torus_tangents(const AngleFunction& psi, const Spinor& g, double s, double t);

/// max deviation of (|Fx|^2, |Fy|^2, Fx.Fy) from (4 sin^2 th2, 4 cos^2 th2, 0).
double torus_metric_residual(const TorusPatch& torus);
double torus_metric_residual(const SurfacePatch& patch, const AngleFunction& psi);

/// Surface pipeline on an (x, y) patch with lambda = -2 sin th2, mu = 2 cos th2 using the torus lift,
/// compared against the torus in first fundamental form.
struct PipelineComparison {
  double first_form = 0.0;  // max |I_surface - I_torus| over (E, F, G)
  double offset = 0.0;      // max |F_surface + F_torus - c|, c fixed at the first node
  PatchReport report;
};
PipelineComparison compare_with_surface_pipeline(const TorusPatch& torus, int nodes);

using Vec3 = std::array<double, 3>;

struct SphereCurve {
  std::vector<double> param;
  std::vector<Vec3> points;
  std::vector<Vec3> unit_tangent;   // from finite differences
  std::vector<double> arclength;
  std::vector<double> curvature;    // oriented by the inner normal -gamma
  std::vector<double> speed;
};

/// Samples gamma(i h), i = 0..n, h = period / n, and measures it with eighth-order differences.
/// gamma must be defined slightly outside [0, period].
SphereCurve measure_sphere_curve(const std::function<Vec3(double)>& gamma, double period, int n);

/// Integral of k ds over one period (periodic trapezoid).
double total_curvature(const SphereCurve& c);

struct KitagawaData {
  double alpha = 0.0;
  SphereCurve gamma1, gamma2;
  double k1_min = 0.0, k1_max = 0.0, k2_min = 0.0, k2_max = 0.0;
  bool disjoint = false;
  double curvature_error1 = 0.0, curvature_error2 = 0.0;  // vs cot(psi_i - alpha)
  double lift_residual = 0.0;  // |p_alpha(g_i) - (gamma_i, gamma_i' / |gamma_i'|)|
};

/// Default alpha: midpoint of (max psi2 + (2k+1) pi, min psi1), narrowed if needed so that
/// sin(psi_i - alpha) > 0 everywhere; NoAdmissibleAlpha when no such alpha exists.
double kitagawa_alpha(const TorusSpec& spec, const TorusValidation& v);
KitagawaData kitagawa_extract(const TorusSpec& spec, const LiftPath& lift, int samples = 1024);

struct WindowStat {
  double min = 0.0;  // min over arcs I, J of int_I k1 - int_J k2
  double max = 0.0;
};

/// Arcs run over all sample pairs, wrapping around the period.
WindowStat window_statistic(const SphereCurve& c1, const SphereCurve& c2);

struct GaussImage {
  SphereCurve g1, g2;  // G1 = conj(g1) I g1, G2 = conj(g2) I g2
  double total1 = 0.0, total2 = 0.0;
  WindowStat window;
  double hopf_residual = 0.0;  // |G - hopf(g)| over the (s, t) grid
  double degree1 = 0.0, degree2 = 0.0;
};

GaussImage gauss_image(const LiftPath& lift, int samples = 1024);

/// Signed area swept by a map of the (s, t) torus into S^2, over 4 pi.
double sphere_degree(const std::function<Vec3(double, double)>& map, double S, double T, int n1, int n2);

struct GaussBonnet {
  double int_K = 0.0;
  double int_KN = 0.0;
  double max_abs_K = 0.0;
  double max_abs_KN = 0.0;
  double residual_K = 0.0;   // |int K - 2 pi (d1 + d2)|
  double residual_KN = 0.0;  // |int K_N - 2 pi (d1 - d2)|
};

GaussBonnet gauss_bonnet(const TorusPatch& torus, const GaussImage& image);

std::string curve_csv(const SphereCurve& c);

/// Period in [lo, hi] at which the factor lift of f (harmonic indices kept) closes with monodromy +-1.
/// Secant on the dominant imaginary component of the monodromy; works when a symmetry of f leaves
/// a one-parameter family of monodromies. NotClosed when no closing period is found.
double close_factor_period(Fourier f, int n, double lo, double hi);

}  // namespace flatspin
