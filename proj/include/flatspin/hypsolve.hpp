#pragma once

#include <string>
#include <vector>

#include "flatspin/angle.hpp"
#include "flatspin/grid.hpp"

namespace flatspin {

/// lambda0, mu0 sampled on the line s = 0 at t = j h, j = 0..n (n = size - 1).
/// When periodic, the samples cover exactly one period (last sample repeats the first).
struct CauchyData {
  double h = 0.0;
  bool periodic = false;
  std::vector<double> lambda0;
  std::vector<double> mu0;

  int intervals() const { return static_cast<int>(lambda0.size()) - 1; }
  double length() const { return intervals() * h; }
};

/// Samples lambda0 = -2 sin(theta2(0, t)), mu0 = 2 cos(theta2(0, t)) over one period of psi2.
CauchyData torus_cauchy_data(const AngleFunction& psi, int n);

struct MetricField {
  GridSpec grid;
  std::vector<double> lambda;
  std::vector<double> mu;

  double lam(int i, int j) const { return lambda[grid.index(i, j)]; }
  double m(int i, int j) const { return mu[grid.index(i, j)]; }
};

/// lambda = -2 sin(theta2), mu = 2 cos(theta2), evaluated pointwise.
MetricField torus_metric_field(const AngleFunction& psi, const GridSpec& grid);

/// Characteristic solve of
///   d_s lambda - d_t lambda = -(psi1' + psi2') mu / 2,
///   d_s mu + d_t mu = -(psi2' - psi1') lambda / 2
/// with the trapezoidal rule along each characteristic, from data on s = 0.
/// The (x, y) grid must have spacing data.h and nodes with (x + y)/h, (x - y)/h integral.
/// Throws GridMismatch, DomainError (node outside the determinacy region of non-periodic
/// data) or SignLoss (lambda mu <= 0 at an output node).
MetricField solve_cauchy(const AngleFunction& psi, const CauchyData& data, const GridSpec& grid);

struct PdeResidual {
  double r1 = 0.0;  // d_x mu - lambda d_x theta2
  double r2 = 0.0;  // d_y lambda + mu d_y theta2
};

/// Central-difference residuals at interior nodes.
PdeResidual pde_residual(const MetricField& field, const AngleFunction& psi);
/// Same with d_x theta2, d_y theta2 replaced by d_y theta1, d_x theta1.
PdeResidual pde_residual_alt(const MetricField& field, const AngleFunction& psi);

struct MeanCurvature {
  std::vector<double> h0;
  std::vector<double> h1;
};

/// (h0, h1) with (1/mu, 1/lambda) = R(theta2) (h0, h1), R = [[c, s], [-s, c]].
MeanCurvature mean_curvature_coeffs(const MetricField& field, const AngleFunction& psi);
/// Pointwise version; throws SignLoss when lambda mu <= 0.
std::pair<double, double> mean_curvature_coeffs(double lambda, double mu, double theta2);

std::string metric_csv(const MetricField& field);

}  // namespace flatspin
