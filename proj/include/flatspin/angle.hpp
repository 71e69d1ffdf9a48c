#pragma once

#include <numbers>
#include <utility>
#include <vector>

#include "flatspin/lorentz.hpp"

namespace flatspin {

/// Real periodic function mean + sum_k c_k cos(k w x) + s_k sin(k w x), w = 2 pi / period.
struct Fourier {
  double period = 2.0 * std::numbers::pi;
  double mean = 0.0;
  std::vector<std::pair<double, double>> harmonics;

  static Fourier constant(double value, double period = 2.0 * std::numbers::pi) { return {period, value, {}}; }

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  double min_value(int samples = 4096) const;
  double max_value(int samples = 4096) const;
  bool is_constant() const;
};

/// Conformal angle psi = (1 + sigma)/2 psi1(s) + (1 - sigma)/2 psi2(t) = theta1 + sigma theta2.
struct AngleFunction {
  Fourier psi1;
  Fourier psi2;

  Lorentz psi(double s, double t) const { return Lorentz::from_split(psi1(s), psi2(t)); }
  double theta1(double s, double t) const { return 0.5 * (psi1(s) + psi2(t)); }
  double theta2(double s, double t) const { return 0.5 * (psi1(s) - psi2(t)); }
};

/// (s, t) = (x + y, x - y).
inline double s_of(double x, double y) { return x + y; }
inline double t_of(double x, double y) { return x - y; }

}  // namespace flatspin
