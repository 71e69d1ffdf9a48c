#pragma once

#include <string>
#include <vector>

#include "flatspin/angle.hpp"
#include "flatspin/quaternion.hpp"
#include "flatspin/splitquat.hpp"

namespace flatspin {

enum class Closure { Periodic, Antiperiodic, Open };

const char* closure_name(Closure c) noexcept;

struct ClosureInfo {
  Closure kind = Closure::Open;
  double defect = 0.0;
};

inline constexpr double kClosureTol = 1e-6;

/// One factor of a lift: samples of a unit quaternion curve at param = i * h, i = 0..n.
struct FactorPath {
  double length = 0.0;
  double h = 0.0;
  std::vector<Quat> samples;

  int intervals() const { return static_cast<int>(samples.size()) - 1; }
  double param(int i) const { return i * h; }
  /// g(length) g(0)^-1.
  Quat monodromy() const { return samples.back() * samples.front().conj(); }
  /// Value at any real parameter: cubic interpolation inside [0, length] and the
  /// relation g(a + k L) = g(a) (g(0)^-1 g(L))^k outside.
  Quat at(double a) const;
};

/// Horizontal lift g = (1 + sigma)/2 g1(s) + (1 - sigma)/2 g2(t).
struct LiftPath {
  FactorPath g1;
  FactorPath g2;
  ClosureInfo closure;

  Spinor at(double s, double t) const { return Spinor::from_pair(g1.at(s), g2.at(t)); }
};

/// RK4 with renormalization for g' g^-1 = cos(psi) J + sin(psi) K over [0, length].
FactorPath integrate_factor(const Fourier& psi, double length, int n, Quat g0);

/// Integrates each factor over one period of its angle function.
LiftPath integrate_lift(const AngleFunction& psi, int n1, int n2, const Spinor& g0);

ClosureInfo classify_monodromy(Quat m1, Quat m2);
ClosureInfo monodromy_class(const LiftPath& path);

/// max over interior samples of |D0|, |D1|, |D2 - cos psi|, |D3 - sin psi| where
/// D = log(g_{i+1} g_{i-1}^-1) / (2h) estimates g' g^-1.
double horizontality_residual(const FactorPath& path, const Fourier& psi);
double horizontality_residual(const LiftPath& path, const AngleFunction& psi);

/// Samples of psi = atan2(K, J) of g' g^-1, unwrapped, first sample in [0, 2 pi).
std::vector<double> extract_angle(const FactorPath& path);

struct AngleSamples {
  std::vector<double> psi1;
  std::vector<double> psi2;
};

AngleSamples extract_angle(const LiftPath& path);

/// Unit-speed reparametrization g o mu of a sampled curve on S^3.
struct ArclengthChart {
  FactorPath path;
  /// mu at the new sample parameters: old parameter as a function of the new one.
  std::vector<double> mu;
  /// Speed |g'| of the input at its samples.
  std::vector<double> speed;
};

/// raw[i] sampled at a = i * h. Throws NotImmersed at a stationary sample.
ArclengthChart arclength_chart(const std::vector<Quat>& raw, double h, int n_out = 0);

/// Samples g' by fourth-order differences (one-sided near the ends).
std::vector<Quat> sample_derivative(const std::vector<Quat>& g, double h);

std::string lift_csv(const LiftPath& path);

}  // namespace flatspin
