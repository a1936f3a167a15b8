#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "detlab/core/fields.hpp"

namespace detlab {

struct GaussianAxis {
  double sigma = 1.0;  ///< position-space width: |ψ|² ∝ exp(−(x−x0)²/2σ²)
  double x0 = 0.0;
  double k0 = 0.0;
};

/// Product Gaussian ψ(x) = Π (2πσ²)^{-1/4} exp(−(x−x0)²/4σ² + ik0(x−x0)),
/// Ψ̂(k) = Π (2σ²/π)^{1/4} exp(−σ²(k−k0)² − ik·x0).
class GaussianPacket {
public:
  GaussianPacket(int dim, std::array<GaussianAxis, 3> axes);
  static GaussianPacket isotropic(int dim, double sigma,
                                  const Eigen::Vector3d& x0 = Eigen::Vector3d::Zero(),
                                  const Eigen::Vector3d& k0 = Eigen::Vector3d::Zero());

  int dim() const { return dim_; }
  const std::array<GaussianAxis, 3>& axes() const { return axes_; }
  Complex position(const Eigen::Vector3d& x) const;
  Complex spectral(const Eigen::Vector3d& k) const;
  /// Largest |k| carrying non-negligible spectral weight (~e^{-60} beyond).
  double k_extent() const;

private:
  int dim_;
  std::array<GaussianAxis, 3> axes_;
};

/// ⟨a|b⟩ in closed form.
Complex overlap(const GaussianPacket& a, const GaussianPacket& b);

/// Normalised finite superposition Σ c_i g_i.
class PacketState {
public:
  PacketState(const GaussianPacket& g);  // NOLINT: implicit on purpose
  PacketState(std::vector<Complex> coeffs, std::vector<GaussianPacket> terms);

  int dim() const { return terms_.front().dim(); }
  Complex position(const Eigen::Vector3d& x) const;
  Complex spectral(const Eigen::Vector3d& k) const;
  double k_extent() const;
  WaveField sample(const Grid& grid, const PhysicalUnits& units = {}) const;

  const std::vector<Complex>& coefficients() const { return coeffs_; }
  const std::vector<GaussianPacket>& terms() const { return terms_; }

private:
  std::vector<Complex> coeffs_;
  std::vector<GaussianPacket> terms_;
};

/// Type-erased Ψ̂₀(k) with its dimension and a spectral cutoff.
class SpectralAmplitude {
public:
  using Fn = std::function<Complex(const Eigen::Vector3d&)>;

  SpectralAmplitude(int dim, Fn fn, double k_extent);
  static SpectralAmplitude from_state(const PacketState& s);
  /// Linear (1D) or trilinear (3D) interpolation of a grid transform.
  static SpectralAmplitude from_field(const SpectralField& g);

  int dim() const { return dim_; }
  double k_extent() const { return k_extent_; }
  Complex operator()(const Eigen::Vector3d& k) const { return fn_(k); }

private:
  int dim_;
  Fn fn_;
  double k_extent_;
};

/// Odd 1D image of an isotropic 3D state: u(x) = √(2π) x ψ(|x|), so that a
/// radial 3D problem maps onto a 1D grid with the same |u|² on x > 0 as
/// 4πr²|ψ|² (each half-line carries half the probability).
WaveField radial_reduction(const GaussianPacket& iso3d, const Grid& grid1d,
                           const PhysicalUnits& units = {});

/// Odd radial image of an outgoing spherical shell: u ∝ e^{−x²/4σ²} sin(k0 x),
/// i.e. ψ(r) ∝ e^{−r²/4σ²} sin(k0 r)/r in 3D.
PacketState spherical_shell(double sigma, double k0);

/// The isotropic 3D amplitude of the state whose radial image is the odd
/// 1D state u: Ψ̂(k) = i û(|k|) / (√(2π)|k|).
SpectralAmplitude radial_lift(const PacketState& u);

} // namespace detlab
