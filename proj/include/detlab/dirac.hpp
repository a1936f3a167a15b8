#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "detlab/core/fields.hpp"
#include "detlab/core/random.hpp"

namespace detlab {

using Spinor = Eigen::Vector4cd;
using Matrix4c = Eigen::Matrix4cd;

/// Standard (Dirac) representation.
struct SpinorAlgebra {
  std::array<Eigen::Matrix2cd, 3> sigma;
  std::array<Matrix4c, 3> alpha;
  Matrix4c beta;
  std::array<Matrix4c, 4> gamma;  ///< γ⁰ = β, γⁱ = βαⁱ
};
const SpinorAlgebra& spinor_algebra();

/// max over the anticommutation relations {αᵢ,αⱼ} = 2δᵢⱼ, {αᵢ,β} = 0, β² = I.
double algebra_residual();

/// M(k) = cħ α·k + βmc², for real or complex k.
Matrix4c dirac_symbol(const Eigen::Vector3d& k, const PhysicalUnits& u = {});
Matrix4c dirac_symbol(const Eigen::Vector3cd& k, const PhysicalUnits& u = {});

double dirac_omega(const Eigen::Vector3d& k, const PhysicalUnits& u = {});

struct Projectors {
  Matrix4c plus, minus;
  double omega = 0.0;
};
/// P±(k) = ½(I ± M(k)/ħω).
Projectors projector(const Eigen::Vector3d& k, const PhysicalUnits& u = {});

/// Unit spinor P₊(k)χ/|P₊(k)χ| (or P₋), χ a fixed reference spinor.
Spinor energy_spinor(const Eigen::Vector3d& k, int sign, const Spinor& chi, const PhysicalUnits& u = {});
/// H(k)v without forming the 4×4 symbol.
Spinor apply_symbol(const Eigen::Vector3d& k, const Spinor& v, const PhysicalUnits& u = {});

/// Four-component field on a grid (position or wavenumber space).
struct DiracField {
  Grid grid;
  std::array<Eigen::VectorXcd, 4> comp;
  PhysicalUnits units;

  DiracField(const Grid& g, const PhysicalUnits& u = {});
  Spinor at(Index i) const { return {comp[0][i], comp[1][i], comp[2][i], comp[3][i]}; }
  void set(Index i, const Spinor& s) {
    for (int a = 0; a < 4; ++a) comp[a][i] = s[a];
  }
  /// Σ Ψ†Ψ times the cell volume of the space it lives in.
  double norm_squared(bool spectral) const;
};

DiracField dirac_forward(const DiracField& psi);
DiracField dirac_inverse(const DiracField& spectral);

/// Ψ̂(k, t) = (e^{−iωt}P₊(k) + e^{iωt}P₋(k)) Ψ̂(k, 0), mode by mode.
DiracField evolve_dirac_spectral(const DiracField& spectral, double t);

/// Ψ̂₀(k) as a function.
using DiracProfile = std::function<Spinor(const Eigen::Vector3d&)>;

/// g(k) e_s(k), with g a normalised Gaussian of width σ_k about k0 (so
/// |Ψ̂₀|² ∝ exp(−|k−k0|²/2σ_k²)).
DiracProfile gaussian_energy_profile(const Eigen::Vector3d& k0, double sigma_k, int sign, const Spinor& chi,
                                     const PhysicalUnits& u = {});

// Complex-k spectrum.
struct ComplexSpectrum {
  Eigen::Vector4cd eigenvalues;
  Complex root;                 ///< s₀ with s₀² = ħ²c²k·k + m²c⁴
  double eigenvalue_residual = 0.0;
  int dim_plus = 0, dim_minus = 0;
  double max_overlap = 0.0;     ///< largest |⟨v₊, v₋⟩| over orthonormal eigenbases
  bool orthogonal = false;
};
ComplexSpectrum complex_k_spectrum(const Eigen::Vector3cd& k, const PhysicalUnits& u = {});

// Step with imaginary vector potential −iλA_μγ⁰γ^μ on x³ ≥ 0.
struct DiracStep {
  Complex K3;
  Spinor A, B, C;
  double reflection = 0.0;          ///< |B|/|A|
  double derivative_residual = 0.0; ///< |ik³(A−B) − (iK³ + λA³/ħc)C| / |k³||A|
  double decay_rate = 0.0;          ///< Im K³ − λA³/ħc
};
/// `a_mu` = (A₀, A³) with A₀ > |A³|; `sign` picks the energy branch of A.
DiracStep dirac_step_reflection(const Eigen::Vector3d& k, double lambda, const Eigen::Vector2d& a_mu, int sign,
                                const Spinor& chi, const PhysicalUnits& u = {});
/// k³ + iλA₀ √(ħ²k² + m²c²)/(ħ²ck³).
Complex k3_expansion(const Eigen::Vector3d& k, double lambda, double a0, const PhysicalUnits& u = {});

// Helices.
struct HelixParams {
  Spinor u_plus, u_minus;
  Eigen::Vector3d a, b, center;
  double omega0 = 0.0;
};
/// Rest-frame spinors: u₊ must lie in the upper, u₋ in the lower two components.
HelixParams helix_params(const Spinor& u_plus, const Spinor& u_minus, const Eigen::Vector3d& x0,
                         const PhysicalUnits& u = {});
/// X(t) = X(0) − (b/ω₀)cos ω₀t + (a/ω₀) sin ω₀t, with X(0) the ellipse center.
Eigen::Vector3d helix_position(const HelixParams& h, double t);
/// c Ψ†αΨ/Ψ†Ψ for Ψ = u₊e^{−iω₀t/2} + u₋e^{iω₀t/2}.
Eigen::Vector3d helix_velocity(const HelixParams& h, double t, const PhysicalUnits& u = {});

struct HelixFit {
  double period = 0.0;
  double semi_major = 0.0, semi_minor = 0.0;
  Eigen::Vector3d center, drift;
  double rms_residual = 0.0;
};
/// Least squares X(t) ≈ c + d t + p cos ωt + q sin ωt with ω found by a
/// 1D search around `omega_guess`.
HelixFit helix_fit(const std::vector<double>& t, const std::vector<Eigen::Vector3d>& x, double omega_guess);

// Asymptotics.
/// Stationary-phase form: zero for |x| ≥ ct, else
/// (ħω^{5/2}/mc⁵)[(it)^{−3/2}P₊(k)Ψ̂₀(k)e^{i(k·x−ωt)} + (−it)^{−3/2}P₋(−k)Ψ̂₀(−k)e^{−i(k·x−ωt)}].
Spinor asymptotic_dirac_wave(const DiracProfile& psihat, const Eigen::Vector3d& x, double t,
                             const PhysicalUnits& u = {});

struct QuadratureBox {
  Eigen::Vector3d center;
  double half_width = 1.0;
  int nodes = 64;   ///< per panel
  int panels = 0;   ///< per axis, uniform; 0 = place panels by accumulated phase
};
/// (2π)^{−3/2} ∫ d³k [P₊(k)e^{i(k·x−ωt)} + P₋(k)e^{i(k·x+ωt)}] Ψ̂₀(k) over a cube.
/// With `positive_only` the projector is skipped and Ψ̂₀ is assumed in range P₊.
Spinor dirac_wave_quadrature(const DiracProfile& psihat, const Eigen::Vector3d& x, double t,
                             const QuadratureBox& box, bool positive_only, const PhysicalUnits& u = {});
/// Panel edges along `axis` at equal increments of accumulated phase of k·x − ωt.
std::vector<double> phase_panel_edges(const QuadratureBox& box, const Eigen::Vector3d& x, double t, int axis,
                                      const PhysicalUnits& u = {});

/// Ψ̃ on the two shell points over k: (Ψ̃(π(k)), Ψ̃(−π(−k))).
struct CovariantPair {
  Spinor upper, lower;
};
CovariantPair to_covariant(const Eigen::Vector3d& k, const Spinor& hat, const PhysicalUnits& u = {});
Spinor from_covariant(const Eigen::Vector3d& k, const CovariantPair& p, const PhysicalUnits& u = {});

/// x^μ = (ct, x) timelike; k^μ = (mc/ħ) x^μ/|x|.
Eigen::Vector4d shell_point(const Eigen::Vector4d& x, const PhysicalUnits& u = {});
double minkowski_norm(const Eigen::Vector4d& x);

/// (mc/ħ|x|)^{3/2}[e^{−i3π/4}Ψ̃(k)e^{−ik·x} + e^{i3π/4}Ψ̃(−k)e^{ik·x}].
Spinor asymptotic_covariant_wave(const DiracProfile& psihat, const Eigen::Vector4d& x, const PhysicalUnits& u = {});

/// Oscillation-averaged covariant density at a surface point with conormal
/// n_μ (n_μx^μ > 0): (m³c⁴/ħ³|x|³) Σ_s Ψ̃̄(sk) n̸ Ψ̃(sk).
double sigma_av(const DiracProfile& psihat, const Eigen::Vector4d& x, const Eigen::Vector4d& n_lower,
                const PhysicalUnits& u = {});
/// Positive-energy density c⁴m³x⁰(n_μx^μ)/(ħ³|x|⁵) |Ψ̂₀(mcx/ħ|x|)|².
double sigma_positive(const DiracProfile& psihat, const Eigen::Vector4d& x, const Eigen::Vector4d& n_lower,
                      const PhysicalUnits& u = {});

/// Mean of Ψ†Ψ of the asymptotic wave over [t, t + window].
double averaged_density(const DiracProfile& psihat, const Eigen::Vector3d& x, double t, double window,
                        int samples = 256, const PhysicalUnits& u = {});
/// Same density with the ± cross term dropped.
double incoherent_density(const DiracProfile& psihat, const Eigen::Vector3d& x, double t,
                          const PhysicalUnits& u = {});

// Classical ensemble.
/// Samples k from a Gaussian |Ψ̂₀|² (width σ_k about k0) and maps to v = c²k/ω.
std::vector<Eigen::Vector3d> sample_velocities(const Eigen::Vector3d& k0, double sigma_k, int n, RandomStream& rng,
                                               const PhysicalUnits& u = {});
/// ρ_v(v) = m³/(ħ³(1−v²/c²)^{5/2}) |Ψ̂₀(mv/ħ√(1−v²/c²))|².
double velocity_density(const DiracProfile& psihat, const Eigen::Vector3d& v, const PhysicalUnits& u = {});
/// c⁴ n_μx^μ/(x⁰)⁴ ρ_v(cx/x⁰).
double sigma_classical(const DiracProfile& psihat, const Eigen::Vector4d& x, const Eigen::Vector4d& n_lower,
                       const PhysicalUnits& u = {});

/// Space-time surface {F(x) = 1} with F homogeneous of degree one, so a
/// world line x = t(c, v) hits it at t = 1/F(c, v).
struct SpacetimeSurface {
  std::function<double(const Eigen::Vector4d&)> gauge;
  double hit_time(const Eigen::Vector3d& v, double c) const;
  /// Checks n_μx^μ > 0 (Euler: equals F = 1 for the gradient conormal) on samples.
  void check_star_shaped(const std::vector<Eigen::Vector3d>& velocities, double c) const;
};
SpacetimeSurface sphere_surface(double R);
/// min(R/|v|, T) arrival: F = max(|x|/R, x⁰/cT).
SpacetimeSurface capped_sphere_surface(double R, double T, double c);

struct CrossingSample {
  double t;
  Eigen::Vector3d x;
};
std::vector<CrossingSample> classical_crossings(const std::vector<Eigen::Vector3d>& velocities,
                                                const SpacetimeSurface& surface, double c);

struct NoSignalingReport {
  double past_fraction_a = 0.0, past_fraction_b = 0.0;
  double z_score = 0.0;                 ///< difference over its Monte Carlo std
  double chi_square_p = 1.0;            ///< homogeneity of the past-region histograms
  double tv = 0.0;
  double paired_difference = 0.0;       ///< same samples through both surfaces
};
/// Receiver sees detections before t_sigma; the two surfaces differ only after it.
NoSignalingReport no_signaling_check(const Eigen::Vector3d& k0, double sigma_k, const SpacetimeSurface& a,
                                     const SpacetimeSurface& b, double t_sigma, int n, std::uint64_t seed,
                                     const PhysicalUnits& u = {});

} // namespace detlab
