#include "flatspin/angle.hpp"

#include <algorithm>
#include <cmath>

namespace flatspin {

double Fourier::operator()(double x) const {
  const double w = 2.0 * std::numbers::pi / period;
  double r = mean;
  for (std::size_t k = 0; k < harmonics.size(); ++k) {
    const double a = static_cast<double>(k + 1) * w * x;
    r += harmonics[k].first * std::cos(a) + harmonics[k].second * std::sin(a);
  }
  return r;
}

double Fourier::derivative(double x) const {
  const double w = 2.0 * std::numbers::pi / period;
  double r = 0.0;
  for (std::size_t k = 0; k < harmonics.size(); ++k) {
    const double kw = static_cast<double>(k + 1) * w;
    r += kw * (-harmonics[k].first * std::sin(kw * x) + harmonics[k].second * std::cos(kw * x));
  }
  return r;
}

double Fourier::second_derivative(double x) const {
  const double w = 2.0 * std::numbers::pi / period;
  double r = 0.0;
  for (std::size_t k = 0; k < harmonics.size(); ++k) {
    const double kw = static_cast<double>(k + 1) * w;
    r -= kw * kw * (harmonics[k].first * std::cos(kw * x) + harmonics[k].second * std::sin(kw * x));
  }
  return r;
}

double Fourier::min_value(int samples) const {
  double m = (*this)(0.0);
  for (int i = 1; i < samples; ++i) m = std::min(m, (*this)(period * i / samples));
  return m;
}

double Fourier::max_value(int samples) const {
  double m = (*this)(0.0);
  for (int i = 1; i < samples; ++i) m = std::max(m, (*this)(period * i / samples));
  return m;
}

bool Fourier::is_constant() const {
  return std::all_of(harmonics.begin(), harmonics.end(),
                     [](const auto& c) { return c.first == 0.0 && c.second == 0.0; });
}

}  // namespace flatspin
