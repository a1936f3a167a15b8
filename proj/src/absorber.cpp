#include "detlab/absorber.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "detlab/core/errors.hpp"
#include "detlab/oracles.hpp"

namespace detlab {

namespace {

double inside_mass(const WaveField& f, const std::vector<char>& inside) {
  double s = 0;
  for (Index i = 0; i < f.values.size(); ++i)
    if (inside[i]) s += std::norm(f.values[i]);
  return s * f.grid.cell_volume();
}

} // namespace

AbsorptionResult run_absorption(const WaveField& psi0, const DetectorRegion& region, double lambda,
                                const HistogramAxes& axes, double t_max, const EvolutionConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (!(lambda >= 0)) throw ConfigurationError("run_absorption: lambda must be >= 0");
  if (!(t_max > 0)) throw ConfigurationError("run_absorption: t_max must be positive");
  if (region.dim() != psi0.grid.dim()) throw ConfigurationError("run_absorption: dimension mismatch");
  if (mass_outside(psi0, region) > 1e-6)
    throw ConfigurationError("run_absorption: initial state has mass > 1e-6 outside the region");

  const Grid& grid = psi0.grid;
  std::vector<char> inside(grid.size());
  std::vector<int> u_bin(grid.size());
  std::vector<double> rho(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const Eigen::Vector3d x = grid.position(i);
    inside[i] = region.contains(x);
    rho[i] = region.scaled_radius(x);
    u_bin[i] = x.norm() > 0 ? axes.directions.bin_of(x.normalized()) : 0;
  }

  AbsorptionResult out;
  out.histogram = DetectionHistogram(axes);
  out.initial_inside_mass = inside_mass(psi0, inside);

  auto observe = [&](const StepView& v) {
    out.inside_mass.push_back(inside_mass(v.field, inside));
    const double tau = axes.tau_of_time(v.t);
    for (Index i = 0; i < grid.size(); ++i) {
      if (inside[i] || v.absorbed[i] <= 0) continue;
      out.histogram.add(u_bin[i], rho[i], tau, v.absorbed[i]);
    }
  };

  EvolutionResult evo;
  if (lambda > 0) {
    evo = evolve_potential(psi0, absorbing_potential(grid, region, lambda), t_max, cfg, observe);
  } else {
    evo = evolve_potential(psi0, ComplexPotential::zero(grid), t_max, cfg, observe);
  }
  out.times = std::move(evo.times);
  out.absorbed = std::move(evo.absorption_record);
  out.final_norm = evo.final.norm_squared();

  double a0 = 0, a1 = 0;
  for (size_t s = 0; s < out.times.size(); ++s) {
    a0 += out.absorbed[s];
    a1 += out.absorbed[s] * out.times[s];
  }
  if (!out.times.empty()) {
    // Trapezoid over (0, M0), (t_s, M_s); T is the last kick time.
    const double T = out.times.back();
    double integral = 0, prev_t = 0, prev_m = out.initial_inside_mass;
    double outside_integral = 0, prev_o = 1.0 - out.initial_inside_mass;
    double norm = 1.0;
    for (size_t s = 0; s < out.times.size(); ++s) {
      const double t = out.times[s];
      const double m = out.inside_mass[s];
      const double o = norm - m;  // the observer sees the field before the kick
      integral += 0.5 * (m + prev_m) * (t - prev_t);
      outside_integral += 0.5 * (o + prev_o) * (t - prev_t);
      prev_t = t;
      prev_m = m;
      prev_o = o;
      norm -= out.absorbed[s];
    }
    const double crossed = out.initial_inside_mass - out.inside_mass.back();
    if (crossed > 0) {
      out.mean_crossing_time = (integral - T * out.inside_mass.back()) / crossed;
      out.residence_time = outside_integral / crossed;
    }
  }
  if (a0 > 0) out.mean_detection_time = a1 / a0;
  out.overshoot = out.mean_detection_time - out.mean_crossing_time;

  if (lambda > 0 && out.histogram.total() < 0.9) {
    out.histogram.under_capture = true;
    out.warnings.push_back("under-capture: captured probability " + std::to_string(out.histogram.total()));
  }
  out.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void validate_ladder(const std::vector<LadderRung>& ladder) {
  if (ladder.empty()) throw ConfigurationError("ladder: no rungs");
  for (const auto& r : ladder)
    if (!(r.R > 0) || !(r.lambda > 0)) throw ConfigurationError("ladder: R and lambda must be positive");
  for (size_t i = 1; i < ladder.size(); ++i) {
    const auto& a = ladder[i - 1];
    const auto& b = ladder[i];
    if (!(b.R > a.R)) throw ConfigurationError("ladder: R must increase");
    if (!(b.lambda < a.lambda)) throw ConfigurationError("ladder: lambda must decrease");
    if (b.lambda * b.R < a.lambda * a.R * (1 - 1e-12))
      throw ConfigurationError("ladder: lambda*R must not decrease");
  }
}

std::vector<RungReport> limit_ladder(const std::vector<LadderRung>& ladder, const RungFactory& factory,
                                     int threads) {
  validate_ladder(ladder);
  std::vector<RungReport> reports(ladder.size());
  auto run_rung = [&](size_t i) {
    RungReport& rep = reports[i];
    rep.rung = ladder[i];
    try {
      RungSetup setup = factory(ladder[i]);
      const auto res = run_absorption(setup.psi0, setup.region, ladder[i].lambda, setup.axes, setup.t_max,
                                      setup.evolution);
      rep.empirical = res.histogram.u_tau();
      rep.oracle = setup.oracle_table.empty()
                       ? binned_cross_section(setup.oracle, setup.region, setup.axes, setup.psi0.units)
                       : setup.oracle_table;
      if (rep.oracle.size() != rep.empirical.size()) throw ConfigurationError("oracle table has the wrong layout");
      rep.tv = tv_to_oracle(rep.empirical, rep.oracle);
      rep.overshoot = res.overshoot;
      rep.residence_time = res.residence_time;
      rep.rho_std = res.histogram.rho_std();
      rep.captured = res.histogram.total();
      rep.runtime_seconds = res.runtime_seconds;
      rep.warnings = res.warnings;
      rep.histogram = res.histogram;
    } catch (const std::exception& e) {
      rep.error = e.what();
    }
  };
  const size_t workers = std::max<size_t>(1, std::min<size_t>(threads, ladder.size()));
  if (workers == 1) {
    for (size_t i = 0; i < ladder.size(); ++i) run_rung(i);
    return reports;
  }
  std::mutex m;
  size_t next = 0;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        size_t i;
        {
          std::lock_guard<std::mutex> lock(m);
          if (next >= ladder.size()) return;
          i = next++;
        }
        run_rung(i);
      }
    });
  for (auto& t : pool) t.join();
  return reports;
}

} // namespace detlab
