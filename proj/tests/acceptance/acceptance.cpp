// Acceptance suite: one PASS/FAIL line per criterion. `detlab_acceptance 3 7`
// runs a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "detlab/absorber.hpp"
#include "detlab/bohmian.hpp"
#include "detlab/core/quadrature.hpp"
#include "detlab/core/stats.hpp"
#include "detlab/dirac.hpp"
#include "detlab/experiments/config.hpp"
#include "detlab/experiments/scenarios.hpp"
#include "detlab/multi_particle.hpp"
#include "detlab/oracles.hpp"
#include "detlab/zeno.hpp"

using namespace detlab;
namespace ex = detlab::experiments;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Detail {
public:
  template <typename T>
  Detail& operator()(const std::string& key, T v) {
    os_ << (first_ ? "" : ", ") << key << " " << v;
    first_ = false;
    return *this;
  }
  std::string str() const { return os_.str(); }

private:
  std::ostringstream os_;
  bool first_ = true;
};

// Shared between criteria that read the same run.
struct Cache {
  std::vector<RungReport> ladder_1d;
  bool have_ladder = false;
  DelayScaling scaling;
  bool have_scaling = false;
} cache;

const std::vector<RungReport>& absorber_ladder_1d() {
  if (!cache.have_ladder) {
    const auto cfg = ex::default_config(ex::ScenarioKind::Absorber1D);
    cache.ladder_1d = limit_ladder(cfg.ladder, ex::absorber_factory(cfg));
    cache.have_ladder = true;
  }
  return cache.ladder_1d;
}

const DelayScaling& bohm_scaling() {
  if (!cache.have_scaling) {
    const double k0 = 2, R = 20, dx = 0.4;
    const std::vector<double> lambdas{0.05, 0.1, 0.2};
    const double t_max = 2 * R / k0 + 8 / (2 * 0.05);
    const Grid g = ex::line_grid(2 * (R + 2.3 * k0 * t_max), dx, 0);
    const auto psi = PacketState(GaussianPacket::isotropic(1, 1.0, Eigen::Vector3d::Zero(), {k0, 0, 0})).sample(g);
    EnsembleOptions opt;
    opt.n_traj = 2000;
    opt.seed = 7;
    opt.t_max = t_max;
    opt.evolution.dt = ex::stable_dt(g, 0.0);
    opt.trajectory.dt = 0.05;
    opt.snapshot_stride_steps = 5;
    cache.scaling = delay_scaling(psi, DetectorRegion::sphere(1, R), lambdas, opt);
    cache.have_scaling = true;
  }
  return cache.scaling;
}

// 1. Soft-step identity on a periodic box train.
Outcome ac1() {
  const double L = 400, sigma = 2, dt = 5, a = -100, b = 100;
  const Index n = 4096;
  const Grid g(1, L, n);
  const PhysicalUnits u;
  auto box0 = [&](double x) {
    double s = 0;
    for (int m = -2; m <= 2; ++m)
      s += 0.5 * (std::erfc((x + m * L - b) / (2 * sigma)) - std::erfc((x + m * L - a) / (2 * sigma)));
    return s;
  };
  WaveField f(g);
  for (Index j = 0; j < n; ++j) f.values[j] = box0(g.coordinate(j));
  const WaveField out = evolve_free(f, dt, std::numeric_limits<double>::infinity());
  double err = 0;
  for (Index j = 0; j < n; ++j) {
    const double x = g.coordinate(j);
    Complex exact = 0;
    for (int m = -2; m <= 2; ++m)
      exact += evolved_soft_step(x + m * L - b, 0, sigma, dt, u) - evolved_soft_step(x + m * L - a, 0, sigma, dt, u);
    err = std::max(err, std::abs(out.values[j] - exact));
  }
  return {err < 1e-6, Detail()("max error", err).str()};
}

// 2. Imaginary-step reflection against |B_k|².
Outcome ac2() {
  const double k0 = 1, sigma = 10, dx = 0.3, dt = 0.01;
  const Index n = 4096;
  const Grid g(1, n * dx, n);
  const PacketState st(GaussianPacket::isotropic(1, sigma, {-8 * sigma, 0, 0}, {k0, 0, 0}));
  const WaveField psi = st.sample(g);
  EvolutionConfig ev;
  ev.dt = dt;

  double identity = 0;
  for (double k : {0.3, 1.0, 2.5})
    for (double l : {0.01, 0.1, 1.0}) identity = std::max(identity, matching_residual(step_coefficients(k, l)));

  std::vector<double> lambdas{0.025, 0.05, 0.1}, amps;
  double worst = 0;
  for (double l : lambdas) {
    const auto r = evolve_potential(psi, half_line_potential(g, 0.0, l), 16 * sigma / k0, ev);
    double refl = 0;
    for (Index j = 0; j < n; ++j)
      if (g.coordinate(j) < 0) refl += std::norm(r.final.values[j]);
    refl *= g.dx();
    // The packet's own spread of k weights |B_k|².
    const double expected = gauss_quadrature(
        [&](double k) { return std::norm(step_coefficients(k, l).B) * std::norm(st.spectral({k, 0, 0})); },
        k0 - 0.4, k0 + 0.4, 64);
    worst = std::max(worst, std::abs(refl / expected - 1));
    amps.push_back(std::sqrt(refl));
  }
  const double slope = loglog_slope(lambdas, amps).slope;
  return {worst < 0.10 && std::abs(slope - 1) <= 0.05 && identity < 1e-12,
          Detail()("max rel error", worst)("slope", slope)("matching identity", identity).str()};
}

// 3. Cross-section convergence, 1D ladder and the radial 3D variant.
Outcome ac3() {
  const auto& lad = absorber_ladder_1d();
  bool ok = true;
  std::ostringstream tv;
  for (size_t i = 0; i < lad.size(); ++i) {
    if (!lad[i].error.empty()) return {false, "rung failed: " + lad[i].error};
    tv << (i ? " > " : "") << lad[i].tv;
    if (i > 0 && !(lad[i].tv < lad[i - 1].tv)) ok = false;
  }
  ok = ok && lad.back().tv < 0.05;

  const auto cfg3 = ex::default_config(ex::ScenarioKind::Absorber3D);
  const auto lad3 = limit_ladder(cfg3.ladder, ex::absorber_factory(cfg3));
  if (!lad3.back().error.empty()) return {false, "radial rung failed: " + lad3.back().error};
  ok = ok && lad3.back().tv < 0.10;
  return {ok, Detail()("1D TV", tv.str())("radial 3D TV", lad3.back().tv).str()};
}

// 4. Residence time ħ/2λ, from flux bookkeeping and from the Poisson clock.
Outcome ac4() {
  const auto& rung = absorber_ladder_1d().back();
  const double target = 1.0 / (2 * rung.rung.lambda);
  const double flux_err = std::abs(rung.residence_time / target - 1);
  bool ok = flux_err < 0.10;

  const auto& ds = bohm_scaling();
  double worst_mean = 0, worst_p = 1;
  size_t n_min = std::numeric_limits<size_t>::max(), lags_min = n_min;
  for (size_t i = 0; i < ds.lambdas.size(); ++i) {
    const double tau = 1.0 / (2 * ds.lambdas[i]);
    std::vector<double> lag;
    for (const auto& r : ds.ensembles[i].records)
      if (!r.stalled && std::isfinite(r.t_d) && std::isfinite(r.t_wid)) lag.push_back(r.t_d - r.t_wid);
    n_min = std::min(n_min, ds.ensembles[i].records.size());
    lags_min = std::min(lags_min, lag.size());
    worst_mean = std::max(worst_mean, std::abs(mean(lag) / tau - 1));
    const auto ks = ks_test(lag, [tau](double x) { return x <= 0 ? 0.0 : 1 - std::exp(-x / tau); });
    worst_p = std::min(worst_p, ks.p_value);
  }
  ok = ok && worst_mean < 0.10 && worst_p > 1e-3 && n_min >= 2000;
  return {ok, Detail()("flux residence error", flux_err)("Bohmian lag error", worst_mean)("min KS p", worst_p)(
                  "ensemble", n_min)("detected", lags_min)
                  .str()};
}

// 5. Zeno survival against 𝒩_n^{-2}, and the Zeno-limit trend.
Outcome ac5() {
  const auto z = ex::zeno_setup(ex::default_config(ex::ScenarioKind::Zeno1D));
  const auto res = run_zeno(z.psi0, z.region, z.zeno, z.axes, z.evolution);
  double worst = 0;
  for (const auto& row : res.ledger) {
    const double o = zeno_survival_oracle(z.oracle, z.region, row.n, z.zeno.period);
    if (o > 1e-3) worst = std::max(worst, std::abs(row.survival / o - 1));
  }
  const bool admissible = z.zeno.admissible(z.region.R(), reference_speed(z.psi0), {});
  const double ratio = z.zeno.period / z.region.R();

  // Near-projective edges, fixed total time, 𝒯 halved three times.
  const double R = 40, t_total = 40;
  const Grid g = ex::line_grid(2 * (R + 100), 0.25, 0);
  const auto psi = PacketState(GaussianPacket::isotropic(1, 2.0, Eigen::Vector3d::Zero(), {1, 0, 0})).sample(g);
  const auto axes = HistogramAxes::uniform(DirectionBinning::signs(), 1, 1, 2, 20, 2.0, R, 1.0);
  std::vector<double> surv;
  for (double period : {2.0, 1.0, 0.5, 0.25}) {
    ZenoConfig zc;
    zc.period = period;
    zc.sigma1 = 1e-4;
    zc.n_max = static_cast<int>(std::lround(t_total / period));
    surv.push_back(run_zeno(psi, DetectorRegion::sphere(1, R), zc, axes, EvolutionConfig{}).ledger.back().survival);
  }
  bool trend = true;
  std::ostringstream tr;
  for (size_t i = 0; i < surv.size(); ++i) {
    tr << (i ? " < " : "") << surv[i];
    if (i > 0 && !(surv[i] > surv[i - 1])) trend = false;
  }
  return {worst < 0.03 && admissible && std::abs(ratio - 0.1) < 1e-12 && trend,
          Detail()("max rel error", worst)("T/R", ratio)("admissible", admissible)("survival", tr.str()).str()};
}

// 6. Zeno and absorber τ-marginals agree.
Outcome ac6() {
  const double R = 400, period = 40, lambda = 0.1;
  const Grid g = ex::line_grid(2 * (R + 400), 0.8, 0);
  const auto psi = PacketState(GaussianPacket::isotropic(1, 2.0, Eigen::Vector3d::Zero(), {1, 0, 0})).sample(g);
  const auto region = DetectorRegion::sphere(1, R);
  const auto axes = HistogramAxes::uniform(DirectionBinning::signs(), 1, 1, 2, 20, 2.05, R, 1.0);
  ZenoConfig z;
  z.period = period;
  z.sigma1 = 0.6;
  z.n_max = static_cast<int>(4 * R / period);
  EvolutionConfig ev;
  ev.dt = 0.05;
  const auto zr = run_zeno(psi, region, z, axes, ev);
  const auto ar = run_absorption(psi, region, lambda, axes, 4 * R + 20 / lambda, ev);
  const double tv = tv_to_oracle(zr.histogram.tau_marginal(), ar.histogram.tau_marginal());
  const bool admissible = z.admissible(R, reference_speed(psi), {});
  return {tv < 0.1 && admissible, Detail()("tau-marginal TV", tv)("admissible", admissible).str()};
}

// 7. Bohmian error orders.
Outcome ac7() {
  const auto& ds = bohm_scaling();
  double stalled = 0;
  for (double s : ds.stalled_fraction) stalled = std::max(stalled, s);
  const double s1 = ds.delay_vs_lambda.slope, s2 = ds.lag_vs_inverse_lambda.slope;
  return {std::abs(s1 - 1) <= 0.2 && std::abs(s2 - 1) <= 0.2 && stalled < 0.05,
          Detail()("delay slope", s1)("lag slope", s2)("stalled", stalled).str()};
}

// 8. Dirac algebra.
Outcome ac8() {
  RandomStream rng(2024, 8);
  double worst = algebra_residual();
  int complex_trials = 0;
  bool dims = true;
  for (int i = 0; i < 200; ++i) {
    const bool cplx = i % 2 == 1;
    const auto r = ex::dirac_algebra_row(rng, cplx);
    worst = std::max({worst, r.projector, r.velocity, r.spectrum});
    dims = dims && r.dim_plus == 2 && r.dim_minus == 2;
    complex_trials += cplx;
  }
  return {worst < 1e-10 && dims,
          Detail()("worst residual", worst)("trials", 200)("complex k", complex_trials).str()};
}

// 9. Stationary-phase Dirac wave against direct quadrature.
Outcome ac9() {
  const ex::DiracSpec d;
  std::vector<ex::AsymptoticsRow> rows;
  for (double ct : d.times) rows.push_back(ex::dirac_asymptotics_row(d, ct, rows.empty()));
  bool ok = rows.back().ct == 400 && rows.back().rel_error < 0.05;
  std::ostringstream es;
  for (size_t i = 0; i < rows.size(); ++i) {
    es << (i ? " > " : "") << rows[i].rel_error;
    if (i > 0 && !(rows[i].rel_error < rows[i - 1].rel_error)) ok = false;
  }
  const double causal = rows.front().outside / rows.front().peak;
  return {ok && causal < 1e-3, Detail()("rel error", es.str())("outside/peak", causal).str()};
}

// 10. Zitterbewegung helices.
Outcome ac10() {
  RandomStream rng(2024, 10);
  double period_err = 0, axis = 0;
  for (int i = 0; i < 100; ++i) {
    const auto [up, um] = ex::random_rest_pair(rng);
    const auto h = ex::helix_row(up, um);
    period_err = std::max(period_err, std::abs(h.period / h.expected_period - 1));
    axis = std::max(axis, h.semi_major / h.bound);
  }
  const auto si = PhysicalUnits::electron_si();
  const auto [up, um] = ex::random_rest_pair(rng);
  const auto h = ex::helix_row(up, um, si);
  const double p_si = std::abs(h.period / 4.047e-21 - 1);
  const double b_si = std::abs(h.bound / 1.93e-13 - 1);
  return {period_err < 1e-3 && axis <= 1 + 1e-9 && p_si < 1e-3 && b_si < 5e-3 && h.semi_major <= h.bound * (1 + 1e-9),
          Detail()("period error", period_err)("max axis/bound", axis)("SI period", h.period)("SI bound", h.bound)
              .str()};
}

// 11. Dirac step.
Outcome ac11() {
  const ex::DiracSpec d;
  const auto rows = ex::dirac_step_rows(d);
  std::vector<double> l, refl, err;
  for (const auto& r : rows) {
    l.push_back(r.lambda);
    refl.push_back(r.reflection);
    err.push_back(std::abs(r.k3 - r.expansion));
  }
  const double slope = loglog_slope(l, refl).slope;
  const double order = loglog_slope(l, err).slope;
  return {std::abs(slope - 1) <= 0.05 && order > 1.9,
          Detail()("reflection slope", slope)("K3 remainder order", order).str()};
}

// 12. N-particle and normalisation oracles.
Outcome ac12() {
  RandomStream rng(2024, 12);
  double fact = 0;
  for (int i = 0; i < 50; ++i) {
    const auto a = GaussianPacket::isotropic(3, 1 + rng.uniform(), Eigen::Vector3d::Zero(),
                                             {rng.normal(), rng.normal(), 1 + rng.uniform()});
    const auto b = GaussianPacket::isotropic(3, 1 + rng.uniform(), Eigen::Vector3d::Zero(),
                                             {rng.normal(), rng.normal(), -1 - rng.uniform()});
    const auto s1 = DetectorRegion::sphere(3, 20), s2 = DetectorRegion::ellipsoid(15, {1, 1.5, 2});
    Eigen::Vector3d u1(rng.normal(), rng.normal(), rng.normal()), u2(rng.normal(), rng.normal(), rng.normal());
    u1.normalize();
    u2.normalize();
    const std::array<ArrivalPoint, 2> pts{ArrivalPoint{s1.surface_point(u1), 5 + 20 * rng.uniform()},
                                          ArrivalPoint{s2.surface_point(u2), 5 + 20 * rng.uniform()}};
    fact = std::max(fact, povm_factorization_residual(a, b, {s1, s2}, pts));
  }

  // Symmetrised pair moving apart; far-field points on each packet's path.
  const auto a = GaussianPacket::isotropic(1, 1.0, Eigen::Vector3d::Zero(), {1.0, 0, 0});
  const auto b = GaussianPacket::isotropic(1, 1.0, Eigen::Vector3d::Zero(), {-1.5, 0, 0});
  const double R = 50;
  const std::array<DetectorRegion, 2> surf{DetectorRegion::sphere(1, R), DetectorRegion::sphere(1, R)};
  const Grid axis(1, 819.2, 8192);
  double multi = 0;
  for (double f : {0.9, 1.0, 1.1}) {
    const std::array<ArrivalPoint, 2> pts{ArrivalPoint{{R, 0, 0}, f * R / 1.0},
                                          ArrivalPoint{{-R, 0, 0}, f * R / 1.5}};
    const double mt = multi_time_sigma(SeparableTwoBody::symmetrized(a, b), surf, pts, axis);
    const double tensor = n_particle_cross_section(symmetrized_spectral(a, b), 1, {surf[0], surf[1]},
                                                   {pts[0], pts[1]});
    multi = std::max(multi, std::abs(mt / tensor - 1));
  }

  const auto st = SpectralAmplitude::from_state(
      PacketState(GaussianPacket::isotropic(3, 1.0, Eigen::Vector3d::Zero(), {0.3, -0.2, 0.8})));
  const double ns = integrate_cross_section(st, DetectorRegion::sphere(3, 10));
  const double ne = integrate_cross_section(st, DetectorRegion::ellipsoid(10, {1, 1.3, 0.8}));
  const bool ok = fact < 1e-12 && multi < 0.03 && std::abs(ns - 1) < 1e-3 && std::abs(ne - 1) < 1e-3;
  return {ok, Detail()("factorization", fact)("multi-time vs tensor", multi)("sphere", ns)("ellipsoid", ne).str()};
}

// 13. No signalling through the choice of a future surface.
Outcome ac13() {
  const ex::NoSignalSpec s;
  const auto r = no_signaling_check(s.k0, s.sigma_k, sphere_surface(s.R), capped_sphere_surface(s.R, s.T, 1.0),
                                    s.t_sigma, 1000000, 13);
  return {std::abs(r.z_score) < 3 && r.paired_difference == 0,
          Detail()("z", r.z_score)("chi2 p", r.chi_square_p)("paired difference", r.paired_difference).str()};
}

} // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"soft-step evolution identity", ac1}, {"imaginary step coefficients", ac2},
      {"cross-section convergence", ac3},    {"overshoot law", ac4},
      {"Zeno survival", ac5},                {"Zeno vs absorber concordance", ac6},
      {"Bohmian error orders", ac7},         {"Dirac algebra", ac8},
      {"Dirac asymptotics", ac9},            {"Zitterbewegung helix", ac10},
      {"Dirac step", ac11},                  {"N-particle and flux oracles", ac12},
      {"no-signalling Monte Carlo", ac13},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("AC%02d %s  %s: %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
