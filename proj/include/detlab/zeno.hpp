#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "detlab/detector_region.hpp"
#include "detlab/histogram.hpp"
#include "detlab/packets.hpp"
#include "detlab/propagator.hpp"

namespace detlab {

enum class ZenoMode { Ledger, MonteCarlo };

struct ZenoConfig {
  double period = 1.0;   ///< 𝒯
  double sigma1 = 1.0;   ///< σ_n = n σ₁
  int n_max = 100;
  ZenoMode mode = ZenoMode::Ledger;
  double c1 = 3.0;
  double c2 = 1.0 / 3.0;
  bool sharp = false;    ///< diagnostics only: projective 1_{Ω^c}
  std::uint64_t seed = 0;

  void validate() const;
  double sigma(int n) const { return n * sigma1; }
  /// c₁ħ𝒯/(mR) ≤ σ₁ ≤ c₂ v²𝒯²/R.
  bool admissible(double R, double reference_speed, const PhysicalUnits& u) const;
};

/// ½(1 − erf(d/2σ)) with d = |x| − R s(u): the P̂_σ^{1/2} multiplier.
double survive_multiplier(double d, double sigma);
/// √(1 − survive²), evaluated without cancellation.
double detect_multiplier(double d, double sigma);

struct PovEffect {
  WaveField survive;
  WaveField detect;
  double p_detect = 0.0;  ///< ‖detect‖² / ‖f‖²
};
PovEffect soft_pov_effect(const WaveField& f, const DetectorRegion& region, double sigma, bool sharp = false);

struct LedgerRow {
  int n = 0;
  double t = 0.0;
  double pre_norm = 0.0;    ///< survival before measurement n
  double p_detect = 0.0;    ///< conditional on survival so far
  double p_survive = 0.0;
  double survival = 0.0;    ///< after measurement n
  double oracle = 0.0;      ///< 𝒩_n^{-2}
  double width = 0.0;       ///< w_n(𝒯)
  double bound_ratio = 0.0;
};

struct ZenoResult {
  std::vector<LedgerRow> ledger;
  DetectionHistogram histogram;
  std::vector<std::string> warnings;
  /// Monte Carlo mode: (T_D, X_D) per repetition; T_D = +∞ if never detected.
  std::vector<double> detection_times;
  std::vector<Eigen::Vector3d> detection_points;
};

/// 𝒩_n^{-2} = ∫ 1_{ħ|k|n𝒯 ≤ mR s(k̂)} |Ψ̂₀(k)|² dk.
double zeno_survival_oracle(const SpectralAmplitude& psihat, const DetectorRegion& region, int n,
                            double period, const PhysicalUnits& u = {});

ZenoResult run_zeno(const WaveField& psi0, const DetectorRegion& region, const ZenoConfig& z,
                    const HistogramAxes& axes, const EvolutionConfig& cfg, int repetitions = 1,
                    int threads = 1);

struct WidthAudit {
  double width = 0.0;
  double bound_ratio = 0.0;
  bool flagged = false;
};
/// w_n(𝒯) = √(σ_n² + ħ²𝒯²/4m²σ_n²) and w_n/(R/n).
WidthAudit step_width_audit(const ZenoConfig& z, const DetectorRegion& region, int n,
                            const PhysicalUnits& u = {});

} // namespace detlab
