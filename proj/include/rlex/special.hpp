#pragma once

#include <cmath>
#include <stdexcept>

namespace rlex {

/// Gamma function for x > 0, Lanczos approximation (g = 7, 9 terms).
inline double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_fn: requires x > 0");
  static const double coeffs[9] = {
      0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
      771.32342877765313,   -176.61502916214059, 12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Reflection keeps the approximation in its accurate range.
    const double pi = 3.14159265358979323846;
    return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  double acc = coeffs[0];
  for (int i = 1; i < 9; ++i) acc += coeffs[i] / (z + i);
  const double t = z + 7.5;
  const double sqrt_two_pi = 2.5066282746310002;
  return sqrt_two_pi * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

/// Digamma for x > 0: recurrence up to x >= 6, then the asymptotic series.
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: requires x > 0");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = std::log(x) - 0.5 * inv;
  series -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0))));
  return acc + series;
}

/// Volume of the unit ball in R^m.
inline double unit_ball_volume(int dim) {
  if (dim < 1) throw std::domain_error("unit_ball_volume: dimension must be >= 1");
  const double pi = 3.14159265358979323846;
  return std::pow(pi, dim / 2.0) / gamma_fn(dim / 2.0 + 1.0);
}

}  // namespace rlex
