#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "detlab/absorber.hpp"
#include "detlab/core/errors.hpp"
#include "detlab/core/units.hpp"

namespace detlab::experiments {

enum class ScenarioKind {
  Absorber1D,
  Absorber3D,
  AbsorberEllipsoid,
  Zeno1D,
  Zeno3D,
  BohmEnsemble,
  DiracSuite,
  OracleTable,
  ClassicalNoSignal,
};

const std::vector<std::string>& scenario_names();
std::string kind_name(ScenarioKind k);
ScenarioKind parse_kind(const std::string& name);

/// Schema violation; `pointer` is the JSON pointer of the offending key.
class ConfigError : public ConfigurationError {
public:
  ConfigError(std::string pointer, const std::string& what)
      : ConfigurationError(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

private:
  std::string pointer_;
};

struct StateSpec {
  std::string family = "gaussian";  ///< gaussian | shell | field
  double sigma = 1.0;
  Eigen::Vector3d x0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d k0 = Eigen::Vector3d::Zero();
  std::string file;                 ///< snapshot path for family = field
};

/// Any of points / dx / length left at 0 is derived from the others and the
/// scenario's box rule. `margin` counts density e-folds of absorption.
struct GridSpec {
  Index points = 0;
  double dx = 0.0;
  double length = 0.0;
  double margin = 20.0;
  double dt = 0.0;
  double edge_threshold = 1e-8;
  bool radial = true;  ///< 3D isotropic scenarios on the odd radial line
};

struct DetectorSpec {
  std::string shape = "sphere";
  Eigen::Vector3d axes = Eigen::Vector3d::Ones();
  double R = 0.0;
  double lambda = 0.0;
  double period = 0.0;
  double sigma1 = 0.0;
  double c1 = 3.0;
  double c2 = 1.0 / 3.0;
  int n_max = 0;
  bool sharp = false;
  bool monte_carlo = false;
  int repetitions = 1000;
  double t_factor = 4.0;     ///< run to t_factor·R/v …
  double lag_factor = 40.0;  ///< … plus lag_factor·ħ/2λ
};

struct HistogramSpec {
  int bands = 8;
  int sectors = 8;
  int n_rho = 1;
  double rho_lo = 1.0;
  double rho_hi = 2.0;
  int n_tau = 20;
  double tau_hi = 2.0;
  double reference_speed = 0.0;  ///< 0 = ħk̄/m of the initial state
};

struct BohmSpec {
  int n_traj = 2000;
  std::vector<double> lambdas{0.05, 0.1, 0.2};
  double dt = 0.05;
  int stride = 5;
};

struct DiracSpec {
  double sigma_k = 0.25;
  Eigen::Vector3d k0{0.0, 0.0, 0.577};
  std::vector<double> times{100.0, 200.0, 400.0};
  int helix_pairs = 100;
  std::vector<double> step_lambdas{0.01, 0.02, 0.04, 0.08};
  Eigen::Vector3d step_k{0.3, 0.2, 0.8};
  bool electron_units = false;
};

struct NoSignalSpec {
  int samples = 1000000;
  Eigen::Vector3d k0{0.0, 0.0, 0.5};
  double sigma_k = 0.3;
  double R = 10.0;
  double T = 60.0;
  double t_sigma = 40.0;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Absorber1D;
  StateSpec state;
  GridSpec grid;
  DetectorSpec detector;
  HistogramSpec histogram;
  std::vector<LadderRung> ladder;
  BohmSpec bohm;
  DiracSpec dirac;
  NoSignalSpec nosignal;
  PhysicalUnits units;
  std::uint64_t seed = 1;
  int threads = 1;
  bool deterministic = true;
  std::string output = "detlab-out";
  nlohmann::json resolved;  ///< defaults merged with the user file
};

/// Tuned defaults for each scenario, as the JSON a user would write.
nlohmann::json default_config_json(ScenarioKind kind);

/// Validates keys and types against the defaults for `scenario`, then merges.
ScenarioConfig parse_config(const nlohmann::json& user);
ScenarioConfig load_config(const std::string& path);
ScenarioConfig default_config(ScenarioKind kind);

/// FNV-1a 64 of the resolved config with run-only keys (threads, output) removed.
std::string config_hash(const ScenarioConfig& cfg);

/// Throws ResourceError when `bytes` exceeds DETLAB_MEMORY_CAP_MB (default 4096).
void check_memory(double bytes, const std::string& what);

} // namespace detlab::experiments
