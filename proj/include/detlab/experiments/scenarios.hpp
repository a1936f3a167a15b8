#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "detlab/absorber.hpp"
#include "detlab/dirac.hpp"
#include "detlab/experiments/config.hpp"
#include "detlab/zeno.hpp"

namespace detlab::experiments {

struct RunManifest {
  std::string scenario;
  std::string config_hash;
  std::string version = DETLAB_VERSION;
  std::uint64_t seed = 0;
  bool deterministic = true;
  double wall_time = 0.0;
  std::string status = "ok";  ///< ok | partial (some rung failed)
  std::vector<std::string> outputs;
  nlohmann::json rungs = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

/// Runs one scenario, writes its CSVs and manifest.json into `out_dir`.
RunManifest run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

/// {"status": "error", "code", "message"[, "pointer"]}.
nlohmann::json error_json(const std::exception& e);

// Building blocks, shared with the acceptance suite.

PacketState make_state(const StateSpec& s, int dim);
/// 1D grid from any two of (length, dx, points); with only dx, N is the next
/// power of two covering `length`.
Grid line_grid(double length, double dx, Index points);
/// `requested` if positive, else min(0.05, 1.2/(d·k_max²)).
double stable_dt(const Grid& g, double requested);
/// |k0| + 2/σ: the top of the occupied spectrum of a Gaussian-family state.
double spectral_reach(const StateSpec& s);

/// Rung setups for the absorber scenarios (1D, radial 3D, Cartesian 3D).
RungFactory absorber_factory(const ScenarioConfig& cfg);

struct ZenoSetup {
  WaveField psi0;
  DetectorRegion region;
  ZenoConfig zeno;
  HistogramAxes axes;
  EvolutionConfig evolution;
  SpectralAmplitude oracle;         ///< for the cross-section table
  DetectorRegion oracle_region;     ///< 3D sphere for the radial variant
};
ZenoSetup zeno_setup(const ScenarioConfig& cfg);

// Dirac pieces.

struct AsymptoticsRow {
  double ct = 0.0;
  double rel_error = 0.0;      ///< |quadrature − stationary phase| / |quadrature| at x = ct/2 ẑ
  double peak = 0.0;           ///< |quadrature| there
  double outside = 0.0;        ///< |quadrature| at 1.05 ct ẑ (NaN unless requested)
  double seconds = 0.0;
};
AsymptoticsRow dirac_asymptotics_row(const DiracSpec& d, double ct, bool causality, const PhysicalUnits& u = {});

struct HelixRow {
  double period = 0.0;
  double expected_period = 0.0;  ///< πħ/mc²
  double semi_major = 0.0, semi_minor = 0.0;
  double bound = 0.0;            ///< ħ/2mc
  double rms = 0.0;
  std::vector<double> t;         ///< integrated path used for the fit
  std::vector<Eigen::Vector3d> x;
};
/// Integrates the Dirac velocity field (RK4) over five periods and fits it.
HelixRow helix_row(const Spinor& u_plus, const Spinor& u_minus, const PhysicalUnits& u = {});
/// Random u₊ in the upper and u₋ in the lower components, scaled to the unit.
std::pair<Spinor, Spinor> random_rest_pair(RandomStream& rng);

struct AlgebraRow {
  double projector = 0.0;      ///< idempotence, orthogonality, completeness, eigen-relation
  double velocity = 0.0;       ///< P±αP± = ±(ck/ω)P±
  double spectrum = 0.0;       ///< complex-k eigenvalue residual
  int dim_plus = 0, dim_minus = 0;
  double overlap = 0.0;
};
/// Real k for even trials, complex k for odd ones.
AlgebraRow dirac_algebra_row(RandomStream& rng, bool complex_k, const PhysicalUnits& u = {});

struct StepRow {
  double lambda = 0.0;
  double reflection = 0.0;
  Complex k3, expansion;
  double derivative_residual = 0.0;
};
std::vector<StepRow> dirac_step_rows(const DiracSpec& d, const PhysicalUnits& u = {});

} // namespace detlab::experiments
