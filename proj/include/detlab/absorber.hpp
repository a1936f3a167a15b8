#pragma once

#include <functional>
#include <string>
#include <vector>

#include "detlab/detector_region.hpp"
#include "detlab/histogram.hpp"
#include "detlab/packets.hpp"
#include "detlab/propagator.hpp"

namespace detlab {

struct AbsorptionResult {
  DetectionHistogram histogram;
  double final_norm = 1.0;
  std::vector<double> times;           ///< kick times (s + ½)dt
  std::vector<double> absorbed;        ///< probability removed per step
  std::vector<double> inside_mass;     ///< mass in Ω seen at each kick
  double initial_inside_mass = 1.0;
  double mean_detection_time = 0.0;    ///< Σ t·loss / Σ loss
  double mean_crossing_time = 0.0;     ///< from −dM_in/dt
  double overshoot = 0.0;              ///< mean_detection_time − mean_crossing_time
  double residence_time = 0.0;         ///< ∫ mass(Ω^c) dt / crossed mass
  std::vector<std::string> warnings;
  double runtime_seconds = 0.0;
};

/// Evolve under −iλ·1_{Ω^c} and bin (2λ/ħ)|Ψ|² per outside cell per step.
AbsorptionResult run_absorption(const WaveField& psi0, const DetectorRegion& region, double lambda,
                                const HistogramAxes& axes, double t_max, const EvolutionConfig& cfg);

struct LadderRung {
  double R = 0.0;
  double lambda = 0.0;
};

/// Everything one rung needs; built per rung so the grid can grow with R.
struct RungSetup {
  WaveField psi0;
  DetectorRegion region;
  HistogramAxes axes;
  double t_max = 0.0;
  EvolutionConfig evolution;
  SpectralAmplitude oracle;
  /// Precomputed oracle on the (u, τ) layout; when non-empty `oracle` is not evaluated.
  std::vector<double> oracle_table;
};
using RungFactory = std::function<RungSetup(const LadderRung&)>;

struct RungReport {
  LadderRung rung;
  double tv = 0.0;
  double overshoot = 0.0;
  double residence_time = 0.0;
  double rho_std = 0.0;
  double captured = 0.0;
  double runtime_seconds = 0.0;
  std::vector<double> empirical;  ///< (u, τ) marginal
  std::vector<double> oracle;
  DetectionHistogram histogram;
  std::vector<std::string> warnings;
  std::string error;              ///< non-empty when the rung failed
};

/// R strictly increasing, λ strictly decreasing, λR non-decreasing.
void validate_ladder(const std::vector<LadderRung>& ladder);

std::vector<RungReport> limit_ladder(const std::vector<LadderRung>& ladder, const RungFactory& factory,
                                     int threads = 1);

} // namespace detlab
