#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "detlab/core/fields.hpp"

namespace detlab {

enum class Scheme { ExactFreeSpectral, SplitStep };

struct EvolutionConfig {
  double dt = 0.01;
  Scheme scheme = Scheme::SplitStep;
  double edge_threshold = 1e-8;
  /// Width of the monitored edge band, as a fraction of N per side.
  double edge_band_fraction = 1.0 / 32.0;

  /// dt > 0 and, for split-step, ħ|k|²_max dt / 2m < π/4.
  void validate(const Grid& grid, const PhysicalUnits& units) const;
};

/// V on the grid; absorbing only (Im V ≤ 0).
struct ComplexPotential {
  Eigen::VectorXcd values;

  static ComplexPotential zero(const Grid& grid);
  static ComplexPotential uniform(const Grid& grid, Complex v);
  void validate(const Grid& grid) const;
  bool is_zero() const;
};

/// Probability in the monitored band next to the periodic boundary.
double edge_mass(const WaveField& f, double band_fraction = 1.0 / 32.0);

/// Multiply Ψ̂ by e^{-iħk²t/2m}.
void apply_free_phase(SpectralField& g, double t);

/// Exact free evolution by one spectral multiply. Throws WraparoundError when
/// the result has more than `edge_threshold` probability in the edge band.
WaveField evolve_free(const WaveField& f, double t, double edge_threshold = 1e-8,
                      double band_fraction = 1.0 / 32.0);

/// What an observer sees at each potential kick (time t_n + dt/2).
struct StepView {
  Index step;
  double t;
  double dt;
  const WaveField& field;                 ///< field just before the kick
  const Eigen::ArrayXd& absorbed;         ///< probability removed per cell by the kick
};
using StepObserver = std::function<void(const StepView&)>;

struct EvolutionResult {
  WaveField final;
  std::vector<double> times;              ///< kick times
  std::vector<double> absorption_record;  ///< probability absorbed per step
};

/// Strang splitting K/2 · V · K/2 with the potential factor e^{-iV dt/ħ}
/// applied exactly per cell. The record holds |Ψ|²(1 − e^{-2λdt/ħ}) summed
/// over cells, i.e. (2λ/ħ)|Ψ|² integrated over the step.
EvolutionResult evolve_potential(const WaveField& f, const ComplexPotential& v, double t_total,
                                 const EvolutionConfig& cfg, const StepObserver& observer = {});

/// σ(dt) = √(σ² + iħdt/2m).
Complex evolved_width(double sigma, double dt, const PhysicalUnits& units);
/// w(dt) = (Re σ(dt)^{-2})^{-1/2} = √(σ² + ħ²dt²/4m²σ²).
double soft_step_width(double sigma, double dt, const PhysicalUnits& units);
/// ½(1 − erf((x − ħk₀dt/m)/2σ(dt))) e^{ik₀x} e^{-iħk₀²dt/2m}.
Complex evolved_soft_step(double x, double k0, double sigma, double dt, const PhysicalUnits& units);

/// Snapshot dump, little-endian: u32 dim, u32 N, f64 L, f64 t, then N^dim
/// pairs of f64 (re, im) in flat grid order.
void write_snapshot(std::ostream& out, const WaveField& f, double t);
WaveField read_snapshot(std::istream& in, double* t = nullptr);

} // namespace detlab
