#pragma once

#include <vector>

#include <Eigen/Core>

#include "detlab/detector_region.hpp"
#include "detlab/histogram.hpp"
#include "detlab/packets.hpp"

namespace detlab {

/// (m/iħt)^{d/2} Ψ̂₀(mx/ħt) e^{ik·x − iωt}, k = mx/ħt, ω = ħk²/2m.
Complex asymptotic_free_wave(const SpectralAmplitude& psihat, const Eigen::Vector3d& x, double t,
                             const PhysicalUnits& u = {});

/// m^d (n·x) / (ħ^d t^{d+1}) |Ψ̂₀(mx/ħt)|² at a boundary point x.
double cross_section(const SpectralAmplitude& psihat, const DetectorRegion& region,
                     const Eigen::Vector3d& x, double t, const PhysicalUnits& u = {});

/// ∫_{u-bin} dA ∫_{t_a}^{t_b} dt σ. For 1D the bin is the sign (0 = −, 1 = +).
/// t_b may be +∞.
double cross_section_mass(const SpectralAmplitude& psihat, const DetectorRegion& region,
                          const DirectionBinning& dirs, int u_bin, double t_a, double t_b,
                          const PhysicalUnits& u = {});

/// ∫∫ σ dA dt over ∂Ω × (0, ∞).
double integrate_cross_section(const SpectralAmplitude& psihat, const DetectorRegion& region,
                               const PhysicalUnits& u = {});

/// Oracle probabilities on the (u, τ) layout of `axes`, row-major [u][τ].
std::vector<double> binned_cross_section(const SpectralAmplitude& psihat, const DetectorRegion& region,
                                         const HistogramAxes& axes, const PhysicalUnits& u = {});

/// TV between a histogram's (u, τ) marginal and oracle probabilities, with
/// the undetected remainder of each side as one extra category.
double tv_to_oracle(const std::vector<double>& empirical, const std::vector<double>& oracle);

struct StepScattering {
  double k = 0.0;
  double lambda = 0.0;
  Complex K, B, C;
};

/// Imaginary step −iλ·1_{x>0}: K = √(k² + 2imλ/ħ²) (Im K > 0),
/// B = (k−K)/(k+K), C = 2k/(k+K).
StepScattering step_coefficients(double k, double lambda, const PhysicalUnits& u = {});
/// max(|1 + B − C|, |k(1 − B) − KC|/k).
double matching_residual(const StepScattering& s);

/// Far-field waves reflected off / transmitted into the absorber at |x| = R.
Complex reflected_wave(const SpectralAmplitude& psihat, const Eigen::Vector3d& x, double t, double R,
                       double lambda, const PhysicalUnits& u = {});
Complex transmitted_wave(const SpectralAmplitude& psihat, const Eigen::Vector3d& x, double t, double R,
                         double lambda, const PhysicalUnits& u = {});

/// J = ∫₀¹ dρ (2−ρ)^{-1} e^{−i2mR|v₀|/ħρ} Ψ̂₀*(((2−ρ)/ρ) m v₀/ħ).
Complex j_integral(const SpectralAmplitude& psihat, const Eigen::Vector3d& v0, double R,
                   const PhysicalUnits& u = {}, int nodes = 128);
/// Leading-order T_WID − T_WOD along direction v₀.
double time_delay_leading(const SpectralAmplitude& psihat, const Eigen::Vector3d& v0, double R,
                          double lambda, const PhysicalUnits& u = {}, int nodes = 128);

/// Absorbing-boundary-rule reflection (k−κ)²/(k+κ)².
double abr_reflection(double k, double kappa);

} // namespace detlab
