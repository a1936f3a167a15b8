#pragma once

#include <array>
#include <functional>
#include <vector>

#include "detlab/detector_region.hpp"
#include "detlab/packets.hpp"

namespace detlab {

/// Ψ̂₀(k₁, …, k_N).
using ManyBodySpectral = std::function<Complex(const std::vector<Eigen::Vector3d>&)>;

struct ArrivalPoint {
  Eigen::Vector3d x;
  double t = 0.0;
};

/// Π_i [m^d (n_i·x_i)/(ħ^d t_i^{d+1})] · |Ψ̂₀(mx₁/ħt₁, …)|².
double n_particle_cross_section(const ManyBodySpectral& psihat, int dim,
                                const std::vector<DetectorRegion>& surfaces,
                                const std::vector<ArrivalPoint>& points, const PhysicalUnits& u = {});

/// Relative gap between the two-body density of a product state and the
/// product of the one-body densities.
double povm_factorization_residual(const GaussianPacket& a, const GaussianPacket& b,
                                   const std::array<DetectorRegion, 2>& surfaces,
                                   const std::array<ArrivalPoint, 2>& points, const PhysicalUnits& u = {});

/// Ψ̂₀ of a ⊗ b, or of the normalised symmetrisation a⊗b + b⊗a.
ManyBodySpectral product_spectral(const GaussianPacket& a, const GaussianPacket& b);
ManyBodySpectral symmetrized_spectral(const GaussianPacket& a, const GaussianPacket& b);

/// Two-body state Σ_r c_r φ_{r,1} ⊗ φ_{r,2}, each φ a product of per-axis
/// Gaussians, so that free evolution per time argument stays one-dimensional.
struct SeparableTwoBody {
  int dim = 1;
  std::vector<Complex> coeffs;
  std::vector<std::array<GaussianPacket, 2>> terms;

  static SeparableTwoBody product(const GaussianPacket& a, const GaussianPacket& b);
  static SeparableTwoBody symmetrized(const GaussianPacket& a, const GaussianPacket& b);
};

/// (ħ/2i)²/m² Φ* ∂₁↔ ∂₂↔ Φ at two boundary points, ∂_i = n(x_i)·∇_i.
/// Φ(t₁,x₁,t₂,x₂) comes from spectral free evolution of each 1D factor on
/// `axis_grid`; the derivatives are finite differences.
double multi_time_sigma(const SeparableTwoBody& state, const std::array<DetectorRegion, 2>& surfaces,
                        const std::array<ArrivalPoint, 2>& points, const Grid& axis_grid,
                        const PhysicalUnits& u = {});

} // namespace detlab
