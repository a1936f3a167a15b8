#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace testing {

using C = std::complex<double>;

// Free 1D Gaussian, ħ = m = 1, written out by hand:
// ψ₀ = (2πσ²)^{-1/4} exp(−x²/4σ² + ik0x).
inline C free_gaussian(double x, double t, double sigma, double k0) {
  const C a = 1.0 + C(0, t / (2 * sigma * sigma));
  const double xc = x - k0 * t;
  return std::pow(2 * std::numbers::pi * sigma * sigma, -0.25) / std::sqrt(a) *
         std::exp(-xc * xc / (4 * sigma * sigma * a) + C(0, k0 * x - 0.5 * k0 * k0 * t));
}

inline double gaussian_spectral_density(double k, double sigma, double k0) {
  return std::sqrt(2 / std::numbers::pi) * sigma * std::exp(-2 * sigma * sigma * (k - k0) * (k - k0));
}

} // namespace testing
