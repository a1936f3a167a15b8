#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "detlab/core/errors.hpp"

namespace detlab {

namespace detail {

/// Maclaurin series of erf. Terms peak near e^{|z|²}; callers keep the
/// cancellation (≈ 2 Re(z)² / ln 10 digits) small.
template <typename Real>
std::complex<Real> erf_series(std::complex<Real> z) {
  using C = std::complex<Real>;
  const C mz2 = -z * z;
  C term = z;  // z^{2n+1} (-1)^n / n!
  C sum = z;
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int n = 1; n < 20000; ++n) {
    term *= mz2 / static_cast<Real>(n);
    const C add = term / static_cast<Real>(2 * n + 1);
    sum += add;
    if (std::abs(add) <= eps * std::abs(sum) && static_cast<Real>(n) > std::norm(z)) break;
  }
  return sum * (2 / std::sqrt(std::numbers::pi_v<Real>));
}

/// Faddeeva w(z) for Im z > 0 via the Laplace continued fraction
/// w(z) = (i/√π) / (z − ½/(z − 1/(z − (3/2)/(z − …)))), modified Lentz.
template <typename Real>
std::complex<Real> faddeeva_cf(std::complex<Real> z) {
  using C = std::complex<Real>;
  const Real tiny = std::numeric_limits<Real>::min() * 1e10;
  const Real eps = std::numeric_limits<Real>::epsilon();
  C f = z;
  if (std::abs(f) < tiny) f = tiny;
  C cc = f;
  C d = 0;
  for (int n = 1; n < 100000; ++n) {
    const Real a = -static_cast<Real>(n) / 2;
    d = z + a * d;
    if (std::abs(d) < tiny) d = tiny;
    cc = z + a / cc;
    if (std::abs(cc) < tiny) cc = tiny;
    d = Real(1) / d;
    const C delta = cc * d;
    f *= delta;
    if (std::abs(delta - Real(1)) < eps) break;
  }
  return C(0, 1) / (std::sqrt(std::numbers::pi_v<Real>) * f);
}

} // namespace detail

/// Entire error function. The series branch (|Re z| < 2) is limited to
/// |Im z| ≤ 30; the continued fraction covers the rest. Finite results are guaranteed only where Im(z)² − Re(z)² < 700; beyond
/// that |erf z| exceeds the double range and the value overflows to ∞.
template <typename Real>
std::complex<Real> complex_erf(std::complex<Real> z) {
  using C = std::complex<Real>;
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("complex_erf: non-finite argument");
  if (std::abs(z.real()) < 2 && std::abs(z.imag()) > 30)
    throw DomainError("complex_erf: |Im z| must be <= 30 when |Re z| < 2");
  if (z.real() < 0) return -complex_erf(-z);
  if (z.imag() == 0) return C(std::erf(z.real()), 0);
  if (std::abs(z) < 3 || z.real() < 2) return detail::erf_series(z);
  // erfc z = e^{-z²} w(iz), and Im(iz) = Re z ≥ 2 keeps the fraction fast.
  const C w = detail::faddeeva_cf(C(-z.imag(), z.real()));
  return Real(1) - std::exp(-z * z) * w;
}

} // namespace detlab
