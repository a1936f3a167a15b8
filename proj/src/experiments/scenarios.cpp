#include "detlab/experiments/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "detlab/bohmian.hpp"
#include "detlab/core/fourier.hpp"
#include "detlab/core/stats.hpp"
#include "detlab/experiments/compare.hpp"
#include "detlab/experiments/csv.hpp"
#include "detlab/oracles.hpp"

namespace detlab::experiments {

using nlohmann::json;
namespace fs = std::filesystem;

json RunManifest::to_json() const {
  return {{"scenario", scenario}, {"config_hash", config_hash}, {"version", version},
          {"seed", seed},         {"deterministic", deterministic}, {"wall_time_s", wall_time},
          {"status", status},     {"outputs", outputs},         {"rungs", rungs},
          {"summary", summary},   {"warnings", warnings}};
}

json error_json(const std::exception& e) {
  json j{{"status", "error"}, {"message", e.what()}, {"code", "internal"}};
  if (const auto* d = dynamic_cast<const Error*>(&e)) j["code"] = d->code();
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) j["pointer"] = c->pointer();
  return j;
}

PacketState make_state(const StateSpec& s, int dim) {
  if (s.family == "shell") return spherical_shell(s.sigma, s.k0.norm());
  if (s.family == "gaussian") return GaussianPacket::isotropic(dim, s.sigma, s.x0, s.k0);
  throw ConfigurationError("make_state: family '" + s.family + "' has no closed form");
}

Grid line_grid(double length, double dx, Index points) {
  if (points > 0 && length > 0) return Grid(1, length, points);
  if (points > 0 && dx > 0) return Grid(1, points * dx, points);
  if (!(dx > 0) || !(length > 0)) throw ConfigurationError("grid: need two of length, dx, points");
  Index n = 8;
  while (n * dx < length) n *= 2;
  return Grid(1, n * dx, n);
}

double stable_dt(const Grid& g, double requested) {
  if (requested > 0) return requested;
  return std::min(0.05, 1.2 / (g.dim() * g.k_max() * g.k_max()));
}

double spectral_reach(const StateSpec& s) { return s.k0.norm() + 2.0 / s.sigma; }

namespace {

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

WaveField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("/state/file", "cannot open '" + path + "'");
  return read_snapshot(in);
}

bool cartesian_3d(const ScenarioConfig& c) {
  return c.kind == ScenarioKind::AbsorberEllipsoid ||
         (c.kind == ScenarioKind::Absorber3D && !(c.grid.radial && c.state.family == "shell"));
}

DetectorRegion region_for(const ScenarioConfig& c, int dim, double R) {
  if (dim == 3 && c.detector.shape == "ellipsoid") return DetectorRegion::ellipsoid(R, c.detector.axes);
  return DetectorRegion::sphere(dim, R);
}

double reference_for(const ScenarioConfig& c, const WaveField& psi) {
  return c.histogram.reference_speed > 0 ? c.histogram.reference_speed : reference_speed(psi);
}

HistogramAxes axes_for(const ScenarioConfig& c, const DirectionBinning& dirs, double R, double v) {
  const auto& h = c.histogram;
  return HistogramAxes::uniform(dirs, h.n_rho, h.rho_lo, h.rho_hi, h.n_tau, h.tau_hi, R, v);
}

std::string tag(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

/// Writes a file, records it in the manifest.
class Outputs {
public:
  Outputs(const std::string& dir, RunManifest& m) : dir_(dir), m_(m) {}
  std::string path(const std::string& name) {
    m_.outputs.push_back(name);
    return (fs::path(dir_) / name).string();
  }

private:
  std::string dir_;
  RunManifest& m_;
};

void add_warnings(RunManifest& m, const std::string& where, const std::vector<std::string>& ws) {
  for (const auto& w : ws) m.warnings.push_back(where + ": " + w);
}

// Absorber scenarios.

void run_absorber(const ScenarioConfig& c, Outputs& out, RunManifest& m) {
  auto reports = limit_ladder(c.ladder, absorber_factory(c), c.threads);
  if (c.deterministic)
    for (auto& r : reports) r.runtime_seconds = 0.0;
  write_ladder_csv(out.path("ladder.csv"), reports);

  std::vector<double> tvs;
  for (size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    json rung{{"R", r.rung.R}, {"lambda", r.rung.lambda}, {"lambda_R", r.rung.R * r.rung.lambda}};
    if (!r.error.empty()) {
      rung["error"] = r.error;
      m.status = "partial";
      m.warnings.push_back("rung " + std::to_string(i) + " failed: " + r.error);
    } else {
      const std::string hist = "histogram_rung" + std::to_string(i) + ".csv";
      write_histogram_csv(out.path(hist), r.histogram);
      DetectionHistogram oracle(r.histogram.axes());
      const int nt = r.histogram.axes().n_tau();
      for (size_t j = 0; j < r.oracle.size(); ++j)
        oracle.add_bin(static_cast<int>(j) / nt, 0, static_cast<int>(j) % nt, r.oracle[j]);
      const std::string orc = "oracle_rung" + std::to_string(i) + ".csv";
      write_histogram_csv(out.path(orc), oracle);
      rung.update({{"tv", r.tv},
                   {"overshoot", r.overshoot},
                   {"residence_time", r.residence_time},
                   {"captured", r.captured},
                   {"rho_std", r.rho_std},
                   {"histogram", hist},
                   {"oracle", orc},
                   {"warnings", r.warnings}});
      add_warnings(m, "rung " + std::to_string(i), r.warnings);
      tvs.push_back(r.tv);
    }
    m.rungs.push_back(rung);
  }
  bool monotone = tvs.size() == reports.size();
  for (size_t i = 1; i < tvs.size(); ++i) monotone = monotone && tvs[i] < tvs[i - 1];
  m.summary["tv_final"] = tvs.empty() ? json(nullptr) : json(tvs.back());
  m.summary["tv_monotone"] = monotone;
}

} // namespace

RungFactory absorber_factory(const ScenarioConfig& c) {
  const bool cart = cartesian_3d(c);
  const bool field = c.state.family == "field";
  const bool radial = !cart && c.state.family == "shell";
  if (c.kind != ScenarioKind::Absorber1D && !cart && !radial && !field)
    throw ConfigError("/state/family", "the radial 3D absorber needs a shell state");

  return [c, cart, field, radial](const LadderRung& rung) {
    const double depth = c.grid.margin * spectral_reach(c.state) / (2.0 * rung.lambda);
    const double reach = rung.R * (c.detector.shape == "ellipsoid" ? c.detector.axes.maxCoeff() : 1.0);
    const double length = c.grid.length > 0 ? c.grid.length : 2.0 * (reach + depth);

    RungSetup s{WaveField{}, DetectorRegion::sphere(1, rung.R), HistogramAxes{}, 0.0, EvolutionConfig{},
                SpectralAmplitude(1, [](const Eigen::Vector3d&) { return Complex{}; }, 0.0), {}};
    Grid grid;
    if (field) {
      s.psi0 = load_field(c.state.file);
      s.psi0.units = c.units;
      grid = s.psi0.grid;
      s.oracle = SpectralAmplitude::from_field(forward_transform(s.psi0));
    } else if (cart) {
      const Index n = c.grid.points > 0 ? c.grid.points : 32;
      check_memory(std::pow(double(n), 3) * 16.0 * 8.0, "3D grid");
      grid = Grid(3, length, n);
      const PacketState st = make_state(c.state, 3);
      s.psi0 = st.sample(grid, c.units);
      s.oracle = SpectralAmplitude::from_state(st);
    } else {
      grid = line_grid(length, c.grid.dx, c.grid.points);
      check_memory(double(grid.size()) * 16.0 * 8.0, "1D grid");
      const PacketState st = make_state(c.state, 1);
      s.psi0 = st.sample(grid, c.units);
      s.oracle = SpectralAmplitude::from_state(st);
    }
    const int dim = grid.dim();
    s.region = region_for(c, dim, rung.R);
    const double v = reference_for(c, s.psi0);
    s.axes = axes_for(c, dim == 1 ? DirectionBinning::signs()
                                  : DirectionBinning::equal_area(c.histogram.bands, c.histogram.sectors),
                      rung.R, v);
    s.t_max = c.detector.t_factor * reach / v + c.detector.lag_factor * c.units.hbar / (2.0 * rung.lambda);
    s.evolution.dt = stable_dt(grid, c.grid.dt);
    s.evolution.edge_threshold = c.grid.edge_threshold;

    if (radial) {
      // 3D oracle τ-marginal, split evenly over the two half-lines.
      const auto axes3 = axes_for(c, DirectionBinning::equal_area(c.histogram.bands, c.histogram.sectors),
                                  rung.R, v);
      const auto o3 = binned_cross_section(radial_lift(make_state(c.state, 1)), DetectorRegion::sphere(3, rung.R),
                                           axes3, c.units);
      const int nt = c.histogram.n_tau;
      s.oracle_table.assign(2 * nt, 0.0);
      for (size_t j = 0; j < o3.size(); ++j) {
        s.oracle_table[j % nt] += 0.5 * o3[j];
        s.oracle_table[nt + j % nt] += 0.5 * o3[j];
      }
    }
    return s;
  };
}

ZenoSetup zeno_setup(const ScenarioConfig& c) {
  const auto& d = c.detector;
  const double length = c.grid.length > 0 ? c.grid.length : 2.0 * (d.R + 0.15 * d.R);
  const Grid grid = line_grid(length, c.grid.dx, c.grid.points);
  check_memory(double(grid.size()) * 16.0 * 8.0, "1D grid");
  const PacketState st = make_state(c.state, 1);
  ZenoSetup z{st.sample(grid, c.units),
              DetectorRegion::sphere(1, d.R),
              ZenoConfig{},
              HistogramAxes{},
              EvolutionConfig{},
              SpectralAmplitude::from_state(st),
              DetectorRegion::sphere(1, d.R)};
  if (c.kind == ScenarioKind::Zeno3D) {
    if (c.state.family != "shell") throw ConfigError("/state/family", "zeno-3d needs a shell state");
    z.oracle = radial_lift(st);
    z.oracle_region = DetectorRegion::sphere(3, d.R);
  }
  z.zeno.period = d.period;
  z.zeno.sigma1 = d.sigma1;
  z.zeno.n_max = d.n_max;
  z.zeno.c1 = d.c1;
  z.zeno.c2 = d.c2;
  z.zeno.sharp = d.sharp;
  z.zeno.mode = d.monte_carlo ? ZenoMode::MonteCarlo : ZenoMode::Ledger;
  z.zeno.seed = c.seed;
  z.zeno.validate();
  z.axes = axes_for(c, DirectionBinning::signs(), d.R, reference_for(c, z.psi0));
  z.evolution.dt = stable_dt(grid, c.grid.dt);
  z.evolution.edge_threshold = c.grid.edge_threshold;
  return z;
}

namespace {

void run_zeno_scenario(const ScenarioConfig& c, Outputs& out, RunManifest& m) {
  const ZenoSetup z = zeno_setup(c);
  const auto res = run_zeno(z.psi0, z.region, z.zeno, z.axes, z.evolution, c.detector.repetitions, c.threads);
  add_warnings(m, "zeno", res.warnings);

  auto ledger = res.ledger;
  double worst = 0.0;
  std::vector<std::vector<double>> oracle3;
  for (auto& row : ledger) {
    const double o = zeno_survival_oracle(z.oracle, z.oracle_region, row.n, z.zeno.period, c.units);
    if (c.kind == ScenarioKind::Zeno1D) row.oracle = o;
    else oracle3.push_back({double(row.n), row.t, o, row.oracle});
    if (o > 1e-3) worst = std::max(worst, std::abs(row.survival - o) / o);
  }
  write_ledger_csv(out.path("ledger.csv"), ledger);
  if (!oracle3.empty())
    write_csv(out.path("oracle_3d.csv"), {"n", "t", "oracle_3d", "oracle_radial"}, oracle3);
  write_histogram_csv(out.path("histogram.csv"), res.histogram);

  DetectionHistogram oracle(z.axes);
  if (c.kind == ScenarioKind::Zeno1D) {
    const auto o = binned_cross_section(z.oracle, z.region, z.axes, c.units);
    const int nt = z.axes.n_tau();
    for (size_t j = 0; j < o.size(); ++j) oracle.add_bin(int(j) / nt, 0, int(j) % nt, o[j]);
    write_histogram_csv(out.path("oracle.csv"), oracle);
    m.summary["tv_to_oracle"] = compare_histograms(res.histogram, oracle).tv;
  }
  if (!res.detection_times.empty()) {
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < res.detection_times.size(); ++i)
      rows.push_back({double(i), res.detection_times[i], res.detection_points[i].x()});
    write_csv(out.path("detections.csv"), {"rep", "t_d", "x_d"}, rows);
  }
  m.summary["max_relative_survival_error"] = worst;
  m.summary["final_survival"] = ledger.empty() ? 0.0 : ledger.back().survival;
  m.summary["admissible"] = z.zeno.admissible(z.region.R(), z.axes.reference_speed, c.units);
}

// Bohmian ensemble.

void run_bohm(const ScenarioConfig& c, Outputs& out, RunManifest& m) {
  const double k0 = c.state.k0.norm();
  if (!(k0 > 0)) throw ConfigError("/state/k0", "the ensemble needs a moving packet");
  const double R = c.detector.R;
  const double lmin = *std::min_element(c.bohm.lambdas.begin(), c.bohm.lambdas.end());
  const double v = c.units.hbar * k0 / c.units.mass;
  const double t_max = 2 * R / v + 8 * c.units.hbar / (2 * lmin);
  const double length = c.grid.length > 0 ? c.grid.length : 2 * (R + 2.3 * v * t_max);
  const Grid grid = line_grid(length, c.grid.dx, c.grid.points);
  const WaveField psi0 = make_state(c.state, 1).sample(grid, c.units);

  EnsembleOptions opt;
  opt.n_traj = c.bohm.n_traj;
  opt.seed = c.seed;
  opt.t_max = t_max;
  opt.evolution.dt = stable_dt(grid, c.grid.dt);
  opt.evolution.edge_threshold = c.grid.edge_threshold;
  opt.trajectory.dt = c.bohm.dt;
  opt.snapshot_stride_steps = c.bohm.stride;
  opt.threads = c.threads;
  const auto ds = delay_scaling(psi0, DetectorRegion::sphere(1, R), c.bohm.lambdas, opt);

  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < ds.lambdas.size(); ++i) {
    const double l = ds.lambdas[i];
    rows.push_back({l, ds.median_wid_delay[i], ds.mean_detection_lag[i], c.units.hbar / (2 * l),
                    ds.stalled_fraction[i]});
    write_trajectory_csv(out.path("trajectories_lambda_" + tag(l) + ".csv"), ds.ensembles[i].records, 1);
    if (ds.stalled_fraction[i] > 0)
      m.warnings.push_back("lambda " + tag(l) + ": stalled fraction " + tag(ds.stalled_fraction[i]));
  }
  write_csv(out.path("scaling.csv"), {"lambda", "median_delay", "mean_lag", "predicted_lag", "stalled"}, rows);
  m.summary["delay_slope"] = ds.delay_vs_lambda.slope;
  m.summary["lag_slope"] = ds.lag_vs_inverse_lambda.slope;
}

// Oracle tables.

void run_oracle_table(const ScenarioConfig& c, Outputs& out, RunManifest& m) {
  const PacketState st = make_state(c.state, 3);
  const auto amp = SpectralAmplitude::from_state(st);
  const auto region = region_for(c, 3, c.detector.R);
  const double v = c.histogram.reference_speed > 0 ? c.histogram.reference_speed
                                                   : c.units.hbar * std::max(c.state.k0.norm(), 1e-3) / c.units.mass;
  const auto axes = axes_for(c, DirectionBinning::equal_area(c.histogram.bands, c.histogram.sectors),
                             c.detector.R, v);
  const auto table = binned_cross_section(amp, region, axes, c.units);
  DetectionHistogram h(axes);
  const int nt = axes.n_tau();
  for (size_t j = 0; j < table.size(); ++j) h.add_bin(int(j) / nt, 0, int(j) % nt, table[j]);
  write_histogram_csv(out.path("cross_section.csv"), h);

  const double norm = integrate_cross_section(amp, region, c.units);
  write_csv(out.path("normalization.csv"), {"R", "integral"}, {{c.detector.R, norm}});
  m.summary["cross_section_integral"] = norm;

  if (c.detector.period > 0 && c.detector.n_max > 0) {
    std::vector<std::vector<double>> rows;
    for (int n = 1; n <= c.detector.n_max; ++n)
      rows.push_back({double(n), n * c.detector.period,
                      zeno_survival_oracle(amp, region, n, c.detector.period, c.units)});
    write_csv(out.path("zeno_survival.csv"), {"n", "t", "oracle"}, rows);
  }

  std::vector<std::vector<double>> steps;
  for (double l : {0.01, 0.02, 0.05, 0.1, 0.2})
    for (int i = 1; i <= 20; ++i) {
      const double k = 0.25 * i;
      const auto s = step_coefficients(k, l, c.units);
      steps.push_back({k, l, std::norm(s.B), std::norm(s.C), s.K.real(), s.K.imag(), matching_residual(s)});
    }
  write_csv(out.path("step_coefficients.csv"),
            {"k", "lambda", "reflection", "transmission_amplitude2", "K_re", "K_im", "residual"}, steps);

  if (c.state.k0.norm() > 0) {
    const Eigen::Vector3d v0 = c.units.hbar * c.state.k0 / c.units.mass;
    std::vector<std::vector<double>> rows;
    for (double l : c.bohm.lambdas)
      rows.push_back({l, time_delay_leading(amp, v0, c.detector.R, l, c.units)});
    write_csv(out.path("time_delay.csv"), {"lambda", "leading_delay"}, rows);
  }
}

// Dirac suite.

void run_dirac(const ScenarioConfig& c, Outputs& out, RunManifest& m) {
  const PhysicalUnits nat = c.units;
  RandomStream rng(c.seed, 11);

  std::vector<std::vector<double>> alg;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto r = dirac_algebra_row(rng, i % 2 == 1, nat);
    worst = std::max({worst, r.projector, r.velocity, r.spectrum});
    alg.push_back({double(i), double(i % 2), r.projector, r.velocity, r.spectrum, double(r.dim_plus),
                   double(r.dim_minus), r.overlap});
  }
  write_csv(out.path("algebra.csv"),
            {"trial", "complex_k", "projector", "velocity", "spectrum", "dim_plus", "dim_minus", "overlap"}, alg);
  m.summary["algebra_worst_residual"] = worst;
  m.summary["anticommutation_residual"] = algebra_residual();

  std::vector<std::vector<double>> asym;
  for (double ct : c.dirac.times) {
    // The light-cone check is costly at large ct (phase rate grows); once suffices.
    const auto r = dirac_asymptotics_row(c.dirac, ct, asym.empty(), nat);
    asym.push_back({r.ct, r.rel_error, r.peak, r.outside, c.deterministic ? 0.0 : r.seconds});
  }
  write_csv(out.path("asymptotics.csv"), {"ct", "rel_error", "peak", "outside_light_cone", "seconds"}, asym);
  if (!asym.empty()) m.summary["asymptotic_rel_error_final"] = asym.back()[1];

  const PhysicalUnits hu = c.dirac.electron_units ? PhysicalUnits::electron_si() : nat;
  std::vector<std::vector<double>> hel;
  double worst_period = 0.0, worst_axis = 0.0;
  for (int i = 0; i < c.dirac.helix_pairs; ++i) {
    const auto [up, um] = random_rest_pair(rng);
    const auto h = helix_row(up, um, hu);
    worst_period = std::max(worst_period, std::abs(h.period / h.expected_period - 1));
    worst_axis = std::max(worst_axis, h.semi_major / h.bound);
    hel.push_back({double(i), h.period, h.expected_period, h.semi_major, h.semi_minor, h.bound, h.rms});
    if (i == 0) {
      std::vector<std::vector<double>> path;
      for (size_t j = 0; j < h.t.size(); ++j) path.push_back({h.t[j], h.x[j].x(), h.x[j].y(), h.x[j].z()});
      write_csv(out.path("helix_path.csv"), {"t", "x", "y", "z"}, path);
    }
  }
  write_csv(out.path("helix.csv"),
            {"pair", "period", "expected_period", "semi_major", "semi_minor", "bound", "rms"}, hel);
  m.summary["helix_period_rel_error"] = worst_period;
  m.summary["helix_axis_over_bound"] = worst_axis;

  std::vector<std::vector<double>> st;
  std::vector<double> ls, refl;
  for (const auto& r : dirac_step_rows(c.dirac, nat)) {
    st.push_back({r.lambda, r.reflection, r.k3.real(), r.k3.imag(), r.expansion.real(), r.expansion.imag(),
                  r.derivative_residual});
    ls.push_back(r.lambda);
    refl.push_back(r.reflection);
  }
  write_csv(out.path("dirac_step.csv"),
            {"lambda", "reflection", "K3_re", "K3_im", "expansion_re", "expansion_im", "derivative_residual"}, st);
  if (ls.size() >= 2) m.summary["step_reflection_slope"] = loglog_slope(ls, refl).slope;
}

void run_nosignal(const ScenarioConfig& c, Outputs& out, RunManifest& m) {
  const auto& s = c.nosignal;
  const auto a = sphere_surface(s.R);
  const auto b = capped_sphere_surface(s.R, s.T, c.units.c);
  const auto r = no_signaling_check(s.k0, s.sigma_k, a, b, s.t_sigma, s.samples, c.seed, c.units);
  write_csv(out.path("nosignal.csv"),
            {"samples", "past_fraction_a", "past_fraction_b", "z_score", "chi_square_p", "tv", "paired_difference"},
            {{double(s.samples), r.past_fraction_a, r.past_fraction_b, r.z_score, r.chi_square_p, r.tv,
              r.paired_difference}});
  m.summary["z_score"] = r.z_score;
  m.summary["paired_difference"] = r.paired_difference;
}

} // namespace

RunManifest run_scenario(const ScenarioConfig& c, const std::string& out_dir) {
  Clock clock;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ArgumentError("cannot create output directory '" + out_dir + "': " + ec.message());

  RunManifest m;
  m.scenario = kind_name(c.kind);
  m.config_hash = config_hash(c);
  m.seed = c.seed;
  m.deterministic = c.deterministic;
  Outputs out(out_dir, m);
  {
    std::ofstream cfg(out.path("config.resolved.json"));
    cfg << c.resolved.dump(2) << '\n';
  }

  switch (c.kind) {
    case ScenarioKind::Absorber1D:
    case ScenarioKind::Absorber3D:
    case ScenarioKind::AbsorberEllipsoid:
      run_absorber(c, out, m);
      break;
    case ScenarioKind::Zeno1D:
    case ScenarioKind::Zeno3D:
      run_zeno_scenario(c, out, m);
      break;
    case ScenarioKind::BohmEnsemble:
      run_bohm(c, out, m);
      break;
    case ScenarioKind::OracleTable:
      run_oracle_table(c, out, m);
      break;
    case ScenarioKind::DiracSuite:
      run_dirac(c, out, m);
      break;
    case ScenarioKind::ClassicalNoSignal:
      run_nosignal(c, out, m);
      break;
  }

  m.wall_time = clock.seconds();
  std::ofstream man(fs::path(out_dir) / "manifest.json");
  man << m.to_json().dump(2) << '\n';
  return m;
}

// Dirac pieces.

AsymptoticsRow dirac_asymptotics_row(const DiracSpec& d, double ct, bool causality, const PhysicalUnits& u) {
  Clock clock;
  Spinor chi;
  chi << 1, 0, 0, 0;
  const auto prof = gaussian_energy_profile(d.k0, d.sigma_k, +1, chi, u);
  const QuadratureBox box{d.k0, 5.9 * d.sigma_k, 64, 0};
  const double t = ct / u.c;
  AsymptoticsRow r;
  r.ct = ct;
  const Eigen::Vector3d x(0, 0, 0.5 * ct);
  const Spinor q = dirac_wave_quadrature(prof, x, t, box, true, u);
  const Spinor a = asymptotic_dirac_wave(prof, x, t, u);
  r.peak = q.norm();
  r.rel_error = (q - a).norm() / r.peak;
  r.outside = causality ? dirac_wave_quadrature(prof, Eigen::Vector3d(0, 0, 1.05 * ct), t, box, true, u).norm()
                        : std::numeric_limits<double>::quiet_NaN();
  r.seconds = clock.seconds();
  return r;
}

std::pair<Spinor, Spinor> random_rest_pair(RandomStream& rng) {
  auto c = [&] { return Complex(rng.normal(), rng.normal()); };
  Spinor up, um;
  up << c(), c(), 0, 0;
  um << 0, 0, c(), c();
  const double n = std::sqrt(up.squaredNorm() + um.squaredNorm());
  return {up / n, um / n};
}

HelixRow helix_row(const Spinor& up, const Spinor& um, const PhysicalUnits& u) {
  const HelixParams h = helix_params(up, um, Eigen::Vector3d::Zero(), u);
  HelixRow r;
  r.expected_period = std::numbers::pi * u.hbar / (u.mass * u.c * u.c);
  r.bound = u.hbar / (2 * u.mass * u.c);
  const int per = 200, periods = 5;
  const double dt = r.expected_period / per;
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int s = 0; s <= per * periods; ++s) {
    const double t = s * dt;
    r.t.push_back(t);
    r.x.push_back(x);
    const Eigen::Vector3d k1 = helix_velocity(h, t, u), k2 = helix_velocity(h, t + dt / 2, u),
                          k4 = helix_velocity(h, t + dt, u);
    x += dt / 6 * (k1 + 4 * k2 + k4);  // k2 = k3: the field does not depend on x
  }
  const HelixFit f = helix_fit(r.t, r.x, 2 * std::numbers::pi / r.expected_period);
  r.period = f.period;
  r.semi_major = f.semi_major;
  r.semi_minor = f.semi_minor;
  r.rms = f.rms_residual;
  return r;
}

AlgebraRow dirac_algebra_row(RandomStream& rng, bool complex_k, const PhysicalUnits& u) {
  AlgebraRow r;
  const Matrix4c I = Matrix4c::Identity();
  const Eigen::Vector3d kr(2 * rng.normal(), 2 * rng.normal(), 2 * rng.normal());
  if (!complex_k) {
    const auto p = projector(kr, u);
    const Matrix4c m = dirac_symbol(kr, u);
    const double hw = u.hbar * p.omega;
    r.projector = std::max({(p.plus * p.plus - p.plus).norm(), (p.minus * p.minus - p.minus).norm(),
                            (p.plus * p.minus).norm(), (p.plus + p.minus - I).norm(),
                            (m * p.plus - hw * p.plus).norm() / hw, (m * p.minus + hw * p.minus).norm() / hw});
    const auto& s = spinor_algebra();
    for (int a = 0; a < 3; ++a) {
      const double f = u.c * kr[a] / p.omega;
      r.velocity = std::max({r.velocity, (p.plus * s.alpha[a] * p.plus - f * p.plus).norm(),
                             (p.minus * s.alpha[a] * p.minus + f * p.minus).norm()});
    }
  }
  const Eigen::Vector3cd k = complex_k ? Eigen::Vector3cd(kr.cast<Complex>() +
                                                          Complex(0, 1) * Eigen::Vector3d(rng.normal(), rng.normal(),
                                                                                          rng.normal())
                                                                              .cast<Complex>())
                                       : kr.cast<Complex>();
  const auto sp = complex_k_spectrum(k, u);
  const Matrix4c m = dirac_symbol(k, u);
  const Matrix4c qp = (m + sp.root * I) / (2.0 * sp.root), qm = (sp.root * I - m) / (2.0 * sp.root);
  const double scale = std::max(1.0, m.norm());
  r.spectrum = std::max({sp.eigenvalue_residual, (m * m - sp.root * sp.root * I).norm() / (scale * scale),
                         (qp * qp - qp).norm(), (qp * qm).norm(), (qp + qm - I).norm()});
  if (sp.dim_plus != 2 || sp.dim_minus != 2) r.spectrum = std::max(r.spectrum, 1.0);
  r.dim_plus = sp.dim_plus;
  r.dim_minus = sp.dim_minus;
  r.overlap = sp.max_overlap;
  return r;
}

std::vector<StepRow> dirac_step_rows(const DiracSpec& d, const PhysicalUnits& u) {
  Spinor chi;
  chi << 1, 0, 0, 0;
  std::vector<StepRow> rows;
  for (double l : d.step_lambdas) {
    const auto s = dirac_step_reflection(d.step_k, l, Eigen::Vector2d(1.0, 0.0), +1, chi, u);
    rows.push_back({l, s.reflection, s.K3, k3_expansion(d.step_k, l, 1.0, u), s.derivative_residual});
  }
  return rows;
}

} // namespace detlab::experiments
