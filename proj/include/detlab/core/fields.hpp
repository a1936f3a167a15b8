#pragma once

#include <complex>

#include <Eigen/Core>

#include "detlab/core/grid.hpp"
#include "detlab/core/units.hpp"

namespace detlab {

/// Ψ sampled on a grid. Scalar-templated like Eigen's own dense types.
template <typename Real>
struct BasicWaveField {
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Grid grid;
  Values values;
  PhysicalUnits units;

  BasicWaveField() = default;
  BasicWaveField(const Grid& g, const PhysicalUnits& u = {})
      : grid(g), values(Values::Zero(g.size())), units(u) {}
  BasicWaveField(const Grid& g, Values v, const PhysicalUnits& u = {})
      : grid(g), values(std::move(v)), units(u) {}

  /// Riemann sum of |Ψ|² dx^d.
  Real norm_squared() const {
    return values.squaredNorm() * static_cast<Real>(grid.cell_volume());
  }
  bool all_finite() const { return values.allFinite(); }

  void normalize() { values /= std::sqrt(norm_squared()); }
};

/// Ψ̂ on the dual grid in FFT order, unitary convention
/// Ψ̂(k) = (2π)^{-d/2} ∫ e^{-ik·x} Ψ(x) dx, so Σ|Ψ̂|² dk^d = Σ|Ψ|² dx^d.
template <typename Real>
struct BasicSpectralField {
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Grid grid;
  Values values;
  PhysicalUnits units;

  Real norm_squared() const {
    return values.squaredNorm() * static_cast<Real>(grid.k_cell_volume());
  }
};

using WaveField = BasicWaveField<double>;
using SpectralField = BasicSpectralField<double>;
using Complex = std::complex<double>;

/// Pointwise |Ψ|² as a real array.
template <typename Real>
Eigen::Array<Real, Eigen::Dynamic, 1> density(const BasicWaveField<Real>& f) {
  return f.values.array().abs2();
}

template <typename Real>
Real inner_norm_distance(const BasicWaveField<Real>& a, const BasicWaveField<Real>& b) {
  return std::sqrt((a.values - b.values).squaredNorm() * static_cast<Real>(a.grid.cell_volume()));
}

} // namespace detlab
