#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flatspin/angle.hpp"
#include "flatspin/grid.hpp"
#include "flatspin/hypsolve.hpp"
#include "flatspin/lift.hpp"
#include "flatspin/splitquat.hpp"

namespace flatspin {

/// omega2 = w2x dx + w2y dy, omega3 = w3x dx + w3y dy.
struct CoframeField {
  GridSpec grid;
  std::vector<double> w2x, w2y, w3x, w3y;
};

/// Dual forms of e2 = (sin th1 / lambda, cos th1 / mu), e3 = (-cos th1 / lambda, sin th1 / mu).
CoframeField dual_coframe(const AngleFunction& psi, const MetricField& field);
/// max |omega_i(e_j) - delta_ij| with the frame rebuilt from (psi, field).
double coframe_duality_residual(const CoframeField& w, const AngleFunction& psi, const MetricField& field);

using SpinorField = std::function<Spinor(double s, double t)>;

struct XiField {
  GridSpec grid;
  std::vector<Vec4> xi_x;  // xi(d/dx)
  std::vector<Vec4> xi_y;  // xi(d/dy)
  std::vector<Vec4> e0;    // images g^-1 sigma g^, g^-1 I g^ of the normal frame
  std::vector<Vec4> e1;
  double membership_residual = 0.0;
};

/// xi = g^-1 (omega2 J + omega3 K) g^ at every node, with g evaluated at (s, t) = (x + y, x - y).
XiField assemble_xi(const SpinorField& g, const CoframeField& coframe);
/// Same with g read from a lift; GridMismatch when (s, t) nodes miss the lift samples.
XiField assemble_xi(const LiftPath& lift, const CoframeField& coframe);

struct SurfacePatch {
  GridSpec grid;
  std::vector<Vec4> F;
  std::vector<Vec4> e0;  // optional normal frame images
  std::vector<Vec4> e1;
  bool spherical = false;
  bool periodic_x = false;
  bool periodic_y = false;
  double closedness = 0.0;

  const Vec4& at(int i, int j) const { return F[grid.index(i, j)]; }
};

/// Path integration from F(node 0) = 0, along the first row then up each column, with
/// fourth-order cumulative quadrature (trapezoid below 4 nodes).
SurfacePatch integrate_xi(const XiField& xi);
/// Same integral taken along the first column, then along each row.
SurfacePatch integrate_xi_columns_first(const XiField& xi);
/// max over plaquettes of |loop integral of xi| / cell area.
double closedness_residual(const XiField& xi);

struct FundFormSample {
  bool valid = false;
  double E = 0.0, F = 0.0, G = 0.0;
  // Second fundamental form in an orthonormal tangent frame, one symmetric matrix per normal.
  double b0[3] = {0.0, 0.0, 0.0};  // (11, 12, 22)
  double b1[3] = {0.0, 0.0, 0.0};
  double K = 0.0;
  double KN = 0.0;
};

struct FundForms {
  GridSpec grid;
  std::vector<FundFormSample> samples;
  double max_abs_K = 0.0;
  double max_abs_KN = 0.0;
};

/// Fourth-order central differences (wrapping across periodic directions), normal plane by
/// Gram-Schmidt, K from the Gauss equation and K_N from the commutator of shape operators.
/// Nodes without a full 5-point stencil are marked invalid. Needs at least 5x5 nodes.
FundForms estimate_fundamental_forms(const SurfacePatch& patch);

struct PatchDerivatives {
  Vec4 Fx, Fy, Fxx, Fxy, Fyy;
};

/// Fourth-order differences at node (i, j); false when the stencil leaves a non-periodic grid.
bool patch_derivatives(const SurfacePatch& patch, int i, int j, PatchDerivatives& d);

/// max deviation of (|Fx|^2, |Fy|^2, Fx.Fy) from (lambda^2, mu^2, 0).
double metric_residual(const SurfacePatch& patch, const MetricField& field);

/// max over interior nodes of |B(u2,u2) - 2/lambda u1|, |B(u3,u3) - 2/mu u0|, |B(u2,u3)|.
double check_second_form(const SurfacePatch& patch, const MetricField& field, const AngleFunction& psi);

/// max |dG(d/dy) - sigma dG(d/dx)| for G = hopf(g), central differences.
double gauss_conformality_residual(const SpinorField& g, const GridSpec& grid);

struct PatchReport {
  double closedness = 0.0;
  double closedness_scaled = 0.0;  // closedness / h^2
  double membership = 0.0;
  double max_abs_K = 0.0;
  double max_abs_KN = 0.0;
  double metric_residual = 0.0;
  double second_form_residual = 0.0;
  double conformality = 0.0;
  double path_difference = 0.0;
};

struct PatchResult {
  MetricField field;
  SurfacePatch patch;
  PatchReport report;
};

/// Full synthesis: lift, coframe, xi, integration, and every diagnostic.
PatchResult synthesize_patch(const AngleFunction& psi, const LiftPath& lift, const MetricField& field);

std::string patch_csv(const SurfacePatch& patch);

}  // namespace flatspin
