#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "detlab/experiments/compare.hpp"
#include "detlab/experiments/config.hpp"
#include "detlab/experiments/csv.hpp"
#include "detlab/experiments/scenarios.hpp"
#include "detlab/oracles.hpp"

using nlohmann::json;
namespace ex = detlab::experiments;

namespace {

struct RunFlags {
  std::string config;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
  std::optional<bool> deterministic;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_scenario) {
  cmd->add_option("--config", f.config, "JSON scenario file");
  if (with_scenario) cmd->add_option("--scenario", f.scenario, "run a scenario with its defaults");
  cmd->add_option("--seed", f.seed, "override the seed");
  cmd->add_option("--threads", f.threads, "worker threads (rungs, repetitions, trajectories)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--deterministic,!--no-deterministic", f.deterministic, "zero timing columns in CSVs");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ex::ConfigError("/", "cannot open config file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ex::ConfigError("/", std::string("parse error: ") + e.what());
  }
}

ex::ScenarioConfig resolve(const RunFlags& f, const std::string& fallback) {
  json j;
  if (!f.config.empty()) j = read_json(f.config);
  else j = {{"scenario", f.scenario.empty() ? fallback : f.scenario}};
  if (!j.is_object()) throw ex::ConfigError("/", "expected an object");
  if (f.seed) j["seed"] = *f.seed;
  if (f.threads) j["threads"] = *f.threads;
  if (!f.out.empty()) j["output"] = f.out;
  if (f.deterministic) j["deterministic"] = *f.deterministic;
  return ex::parse_config(j);
}

int run(const ex::ScenarioConfig& cfg) {
  const auto m = ex::run_scenario(cfg, cfg.output);
  json brief{{"status", m.status}, {"scenario", m.scenario}, {"config_hash", m.config_hash},
             {"output", cfg.output}, {"summary", m.summary},   {"warnings", m.warnings.size()}};
  std::cout << brief.dump(2) << '\n';
  return m.status == "ok" ? 0 : 3;
}

/// Oracle on the layout of `h` for the state and detector of a scenario file.
std::vector<double> oracle_for(const ex::ScenarioConfig& c, const detlab::DetectionHistogram& h) {
  using namespace detlab;
  const int dim = h.axes().directions.dim();
  const double R = c.ladder.empty() ? c.detector.R : c.ladder.back().R;
  double v = c.histogram.reference_speed;
  const bool radial = dim == 1 && c.state.family == "shell";
  if (!(v > 0)) {
    const double span = 2 * (c.state.x0.norm() + 20 * c.state.sigma);
    if (dim == 1) {
      const Grid g(1, std::max(span, 40 * c.state.sigma), 4096);
      v = reference_speed(ex::make_state(c.state, 1).sample(g, c.units));
    } else {
      const Grid g(3, span, 64);
      v = reference_speed(ex::make_state(c.state, 3).sample(g, c.units));
    }
  }
  HistogramAxes axes = h.axes();
  axes.R = R;
  axes.reference_speed = v;
  if (radial) {
    auto a3 = axes;
    a3.directions = DirectionBinning::equal_area(c.histogram.bands, c.histogram.sectors);
    const auto o3 = binned_cross_section(radial_lift(ex::make_state(c.state, 1)), DetectorRegion::sphere(3, R), a3,
                                         c.units);
    const int nt = axes.n_tau();
    std::vector<double> o(2 * nt, 0.0);
    for (size_t j = 0; j < o3.size(); ++j) {
      o[j % nt] += 0.5 * o3[j];
      o[nt + j % nt] += 0.5 * o3[j];
    }
    return o;
  }
  const auto region = dim == 3 && c.detector.shape == "ellipsoid" ? DetectorRegion::ellipsoid(R, c.detector.axes)
                                                                  : DetectorRegion::sphere(dim, R);
  return binned_cross_section(SpectralAmplitude::from_state(ex::make_state(c.state, dim)), region, axes, c.units);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"detlab: detection-time simulations and their oracles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DETLAB_VERSION);

  RunFlags run_flags, oracle_flags, dirac_flags;
  auto* run_cmd = app.add_subcommand("run", "run a scenario and write CSVs plus manifest.json");
  add_run_flags(run_cmd, run_flags, true);

  std::string hist, oracle_csv, oracle_cfg;
  double n_eff = 1e4;
  auto* cmp = app.add_subcommand("compare", "TV, chi-square and KS between a histogram and an oracle");
  cmp->add_option("--histogram", hist, "histogram CSV")->required()->check(CLI::ExistingFile);
  auto* o1 = cmp->add_option("--oracle", oracle_csv, "oracle (or second histogram) CSV")->check(CLI::ExistingFile);
  auto* o2 = cmp->add_option("--config", oracle_cfg, "scenario file whose state and detector define the oracle")
                 ->check(CLI::ExistingFile);
  o1->excludes(o2);
  cmp->add_option("--effective-count", n_eff, "detections assumed for the p-values");

  auto* orc = app.add_subcommand("oracle", "oracle tables (cross section, Zeno survival, step, delay)");
  add_run_flags(orc, oracle_flags, false);
  auto* dir = app.add_subcommand("dirac", "Dirac checks: algebra, asymptotics, helices, step");
  add_run_flags(dir, dirac_flags, false);

  bool show_defaults = false;
  std::string show;
  auto* ls = app.add_subcommand("list-scenarios", "list scenario names");
  ls->add_option("--show", show, "print the default config of one scenario");
  ls->add_flag("--defaults", show_defaults, "print every default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cout << json{{"status", "error"}, {"code", "usage"}, {"message", e.what()}}.dump() << '\n';
    return code;
  }

  try {
    if (*run_cmd) {
      if (run_flags.config.empty() && run_flags.scenario.empty())
        throw ex::ConfigError("/scenario", "give --config or --scenario");
      return run(resolve(run_flags, ""));
    }
    if (*orc) {
      auto cfg = resolve(oracle_flags, "oracle-table");
      if (cfg.kind != ex::ScenarioKind::OracleTable) throw ex::ConfigError("/scenario", "expected oracle-table");
      return run(cfg);
    }
    if (*dir) {
      auto cfg = resolve(dirac_flags, "dirac-suite");
      if (cfg.kind != ex::ScenarioKind::DiracSuite) throw ex::ConfigError("/scenario", "expected dirac-suite");
      return run(cfg);
    }
    if (*cmp) {
      if (oracle_csv.empty() && oracle_cfg.empty()) throw detlab::ArgumentError("compare: give --oracle or --config");
      const auto h = ex::read_histogram_csv(hist);
      ex::Comparison c;
      if (!oracle_csv.empty()) {
        c = ex::compare_histograms(h, ex::read_histogram_csv(oracle_csv), n_eff);
      } else {
        const auto o = oracle_for(ex::load_config(oracle_cfg), h);
        c = ex::compare_distributions(h.u_tau(), o, h.axes().n_tau(), n_eff);
      }
      std::cout << json{{"status", "ok"},
                        {"tv", c.tv},
                        {"chi_square", {{"statistic", c.chi_square.statistic},
                                        {"dof", c.chi_square.dof},
                                        {"p_value", c.chi_square.p_value}}},
                        {"ks_tau", {{"statistic", c.ks_tau.statistic}, {"p_value", c.ks_tau.p_value}}},
                        {"total_histogram", c.total_a},
                        {"total_oracle", c.total_b},
                        {"effective_count", c.effective_count}}
                       .dump(2)
                << '\n';
      return 0;
    }
    if (*ls) {
      if (!show.empty()) {
        std::cout << ex::default_config_json(ex::parse_kind(show)).dump(2) << '\n';
      } else if (show_defaults) {
        json all = json::object();
        for (const auto& n : ex::scenario_names()) all[n] = ex::default_config_json(ex::parse_kind(n));
        std::cout << all.dump(2) << '\n';
      } else {
        for (const auto& n : ex::scenario_names()) std::cout << n << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "detlab: " << e.what() << '\n';
    std::cout << ex::error_json(e).dump(2) << '\n';
    const auto* d = dynamic_cast<const detlab::Error*>(&e);
    if (d && (d->code() == "configuration" || d->code() == "argument")) return 2;
    if (d && d->code() == "resource") return 4;
    return 1;
  }
  return 0;
}
