#include "detlab/bohmian.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

#include "detlab/core/errors.hpp"
#include "detlab/core/fourier.hpp"

namespace detlab {

void SnapshotStore::push(double t, WaveField f) {
  if (!times_.empty() && t < times_.back()) throw ArgumentError("SnapshotStore: times must not decrease");
  peaks_.push_back(f.values.cwiseAbs2().maxCoeff());
  times_.push_back(t);
  fields_.push_back(std::move(f));
}

SnapshotStore SnapshotStore::free(const WaveField& psi0, double t_max, double stride) {
  if (!(stride > 0) || !(t_max > 0)) throw ArgumentError("SnapshotStore::free: need stride, t_max > 0");
  SnapshotStore s;
  SpectralField g = forward_transform(psi0);
  const auto n = static_cast<long>(std::ceil(t_max / stride - 1e-9));
  s.push(0.0, psi0);
  for (long i = 1; i <= n; ++i) {
    apply_free_phase(g, stride);
    s.push(i * stride, inverse_transform(g));
  }
  return s;
}

SnapshotStore SnapshotStore::absorbing(const WaveField& psi0, const ComplexPotential& v, double t_max,
                                       const EvolutionConfig& cfg, int stride_steps) {
  if (stride_steps < 1) throw ArgumentError("SnapshotStore::absorbing: stride must be >= 1");
  SnapshotStore s;
  s.push(0.0, psi0);
  Eigen::VectorXcd half_kick;
  auto observe = [&](const StepView& view) {
    if (view.step % stride_steps != 0) return;
    if (half_kick.size() == 0) {
      half_kick.resize(v.values.size());
      for (Index i = 0; i < half_kick.size(); ++i)
        half_kick[i] = std::exp(Complex(0, -0.5 * view.dt / psi0.units.hbar) * v.values[i]);
    }
    WaveField f = view.field;
    f.values.array() *= half_kick.array();
    s.push(view.t, std::move(f));
  };
  EvolutionResult r = evolve_potential(psi0, v, t_max, cfg, observe);
  s.push(t_max, std::move(r.final));
  return s;
}

SnapshotStore SnapshotStore::zeno(const WaveField& psi0, const DetectorRegion& region, const ZenoConfig& z,
                                  const EvolutionConfig& cfg, int per_period) {
  z.validate();
  if (per_period < 1) throw ArgumentError("SnapshotStore::zeno: per_period must be >= 1");
  SnapshotStore s;
  s.push(0.0, psi0);
  WaveField f = psi0;
  for (int n = 1; n <= z.n_max; ++n) {
    const double t0 = (n - 1) * z.period;
    for (int j = 1; j <= per_period; ++j) {
      const double h = z.period * j / per_period;
      s.push(t0 + h, evolve_free(f, h, cfg.edge_threshold, cfg.edge_band_fraction));
    }
    PovEffect e = soft_pov_effect(s.fields_.back(), region, z.sigma(n), z.sharp);
    f = std::move(e.survive);
    if (f.norm_squared() < 1e-14) break;
    s.push(n * z.period, f);
  }
  return s;
}

SnapshotStore::Velocity SnapshotStore::velocity(const Eigen::Vector3d& x, double t) const {
  size_t i = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
  i = std::clamp<size_t>(i, 1, times_.size() - 1) - 1;
  const double span = times_[i + 1] - times_[i];
  const double w = span > 0 ? std::clamp((t - times_[i]) / span, 0.0, 1.0) : 1.0;
  const auto a = FieldSampler(fields_[i])(x);
  const auto b = FieldSampler(fields_[i + 1])(x);
  const Complex psi = (1 - w) * a.value + w * b.value;
  const Eigen::Vector3cd grad = (1 - w) * a.gradient + w * b.gradient;
  const double floor = floor_fraction * std::max(peaks_[i], peaks_[i + 1]);
  Velocity out;
  const double rho = std::norm(psi);
  if (!(rho > floor)) {
    out.v.setZero();
    out.below_floor = true;
    return out;
  }
  const auto& u = fields_[i].units;
  for (int k = 0; k < 3; ++k) out.v[k] = u.hbar / u.mass * std::imag(grad[k] / psi);
  return out;
}

double SnapshotStore::density(const Eigen::Vector3d& x, double t) const {
  size_t i = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
  i = std::clamp<size_t>(i, 1, times_.size() - 1) - 1;
  const double span = times_[i + 1] - times_[i];
  const double w = span > 0 ? std::clamp((t - times_[i]) / span, 0.0, 1.0) : 1.0;
  return std::norm((1 - w) * FieldSampler(fields_[i])(x).value + w * FieldSampler(fields_[i + 1])(x).value);
}

Trajectory integrate_trajectory(const SnapshotStore& store, const DetectorRegion& region,
                                const Eigen::Vector3d& q0, const TrajectoryOptions& opt,
                                const DetectionRule& rule, RandomStream* rng) {
  if (!(opt.dt > 0)) throw ArgumentError("integrate_trajectory: dt must be positive");
  if (rule.kind != DetectionRule::Kind::None && rng == nullptr)
    throw ArgumentError("integrate_trajectory: detection rule needs a random stream");
  const double hbar = store.snapshot(0).units.hbar;
  const double t_end = std::min(opt.t_max, store.t_max());

  double h = opt.dt;
  if (rule.kind == DetectionRule::Kind::Zeno) h = rule.zeno.period / std::ceil(rule.zeno.period / opt.dt);

  Trajectory tr;
  double t = 0.0;
  Eigen::Vector3d q = q0;
  if (opt.keep_path) {
    tr.t.push_back(t);
    tr.q.push_back(q);
  }
  if (store.velocity(q, t).below_floor) {
    tr.stalled = true;
    return tr;
  }
  const double threshold = rule.kind == DetectionRule::Kind::Poisson ? rng->exponential(1.0) : 0.0;
  const double rate = 2 * rule.lambda / hbar;
  double hazard = 0.0;
  double g = region.scaled_radius(q) - 1.0;

  while (t < t_end - 1e-12) {
    const double dt = std::min(h, t_end - t);
    const auto k1 = store.velocity(q, t);
    const auto k2 = store.velocity(q + 0.5 * dt * k1.v, t + 0.5 * dt);
    const auto k3 = store.velocity(q + 0.5 * dt * k2.v, t + 0.5 * dt);
    const auto k4 = store.velocity(q + dt * k3.v, t + dt);
    if (k1.below_floor || k2.below_floor || k3.below_floor || k4.below_floor) {
      tr.stalled = true;
      break;
    }
    const Eigen::Vector3d qn = q + dt / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    const double tn = t + dt;
    if (!qn.allFinite()) {
      tr.stalled = true;
      break;
    }
    const double gn = region.scaled_radius(qn) - 1.0;
    const double frac = (g != gn) ? g / (g - gn) : 0.0;

    if (g < 0 && gn >= 0 && !tr.first_exit.found()) {
      tr.first_exit.t = t + frac * dt;
      tr.first_exit.x = q + frac * (qn - q);
      if (opt.stop_at_exit) {
        q = qn;
        t = tn;
        break;
      }
    }
    if (g >= 0 && gn < 0 && tr.first_exit.found()) tr.reentered = true;

    if (rule.kind == DetectionRule::Kind::Poisson && rate > 0) {
      double out_lo = t, out_hi = t;  // part of [t, tn] spent in Ω^c
      if (g >= 0 && gn >= 0) {
        out_hi = tn;
      } else if (g < 0 && gn >= 0) {
        out_lo = t + frac * dt;
        out_hi = tn;
      } else if (g >= 0 && gn < 0) {
        out_hi = t + frac * dt;
      }
      const double inc = rate * (out_hi - out_lo);
      if (hazard + inc >= threshold) {
        const double td = out_lo + (threshold - hazard) / rate;
        const double w = (td - t) / dt;
        tr.detection.t = td;
        tr.detection.x = q + w * (qn - q);
        q = qn;
        t = tn;
        break;
      }
      hazard += inc;
    }

    if (rule.kind == DetectionRule::Kind::Zeno) {
      const double n_real = tn / rule.zeno.period;
      const long n = std::lround(n_real);
      if (n >= 1 && std::abs(n_real - n) < 1e-9) {
        if (n > rule.zeno.n_max) {
          q = qn;
          t = tn;
          break;
        }
        const double r = qn.norm();
        const double edge = r > 0 ? region.R() * region.shape(qn / r) : region.R();
        const double s = survive_multiplier(r - edge, rule.zeno.sigma(static_cast<int>(n)));
        if (rng->uniform() < 1 - s * s) {
          tr.detection.t = n * rule.zeno.period;
          tr.detection.x = qn;
          q = qn;
          t = tn;
          break;
        }
      }
    }

    q = qn;
    t = tn;
    g = gn;
    if (opt.keep_path) {
      tr.t.push_back(t);
      tr.q.push_back(q);
    }
  }
  if (opt.keep_path && (tr.t.empty() || tr.t.back() != t)) {
    tr.t.push_back(t);
    tr.q.push_back(q);
  }
  return tr;
}

std::vector<Eigen::Vector3d> sample_positions(const WaveField& psi0, int n, RandomStream& rng) {
  const Grid& grid = psi0.grid;
  std::vector<double> cdf(grid.size());
  double acc = 0;
  for (Index i = 0; i < grid.size(); ++i) {
    acc += std::norm(psi0.values[i]);
    cdf[i] = acc;
  }
  if (!(acc > 0)) throw DomainError("sample_positions: zero field");
  std::vector<Eigen::Vector3d> out;
  out.reserve(n);
  const double dx = grid.dx();
  for (int s = 0; s < n; ++s) {
    const double target = rng.uniform() * acc;
    const Index cell = std::min<Index>(std::upper_bound(cdf.begin(), cdf.end(), target) - cdf.begin(), grid.size() - 1);
    Eigen::Vector3d x = grid.position(cell);
    for (int a = 0; a < grid.dim(); ++a) x[a] += (rng.uniform() - 0.5) * dx;
    out.push_back(x);
  }
  return out;
}

EnsembleResult ensemble_arrivals(const WaveField& psi0, const DetectorRegion& region, const SnapshotStore& wod,
                                 const SnapshotStore& wid, const DetectionRule& rule, const EnsembleOptions& opt) {
  if (opt.n_traj < 1) throw ArgumentError("ensemble_arrivals: n_traj must be >= 1");
  RandomStream start(opt.seed, 0);
  const auto q0 = sample_positions(psi0, opt.n_traj, start);
  const double inf = std::numeric_limits<double>::infinity();
  const Eigen::Vector3d nan = Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN());

  EnsembleResult res;
  res.records.assign(opt.n_traj, ArrivalRecord{inf, inf, inf, nan, nan, nan, false, false});
  auto one = [&](int i) {
    TrajectoryOptions free_opt = opt.trajectory;
    free_opt.stop_at_exit = true;
    if (opt.t_max > 0) free_opt.t_max = opt.t_max;
    const Trajectory a = integrate_trajectory(wod, region, q0[i], free_opt);

    TrajectoryOptions wid_opt = free_opt;
    wid_opt.stop_at_exit = rule.kind == DetectionRule::Kind::None;
    RandomStream rng(opt.seed, 1 + static_cast<std::uint64_t>(i));
    const Trajectory b = integrate_trajectory(wid, region, q0[i], wid_opt, rule, &rng);

    ArrivalRecord& r = res.records[i];
    r.t_wod = a.first_exit.t;
    r.x_wod = a.first_exit.x;
    r.t_wid = b.first_exit.t;
    r.x_wid = b.first_exit.x;
    r.t_d = b.detection.t;
    r.x_d = b.detection.x;
    r.reentered = b.reentered;
    r.stalled = a.stalled || b.stalled;
  };

  const int workers = std::max(1, std::min(opt.threads, opt.n_traj));
  if (workers == 1) {
    for (int i = 0; i < opt.n_traj; ++i) one(i);
  } else {
    std::mutex m;
    int next = 0;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          int i;
          {
            std::lock_guard<std::mutex> lock(m);
            if (next >= opt.n_traj) return;
            i = next++;
          }
          one(i);
        }
      });
    for (auto& t : pool) t.join();
  }

  std::vector<double> wod_t, wid_t, d_t;
  int stalled = 0;
  for (const auto& r : res.records) {
    if (r.stalled) {
      ++stalled;
      continue;
    }
    if (std::isfinite(r.t_wod)) wod_t.push_back(r.t_wod);
    if (std::isfinite(r.t_wid)) wid_t.push_back(r.t_wid);
    if (std::isfinite(r.t_d)) d_t.push_back(r.t_d);
  }
  res.stalled_fraction = static_cast<double>(stalled) / opt.n_traj;
  if (!wod_t.empty()) res.median_t_wod = median(wod_t);
  if (!wid_t.empty()) res.median_t_wid = median(wid_t);
  if (!d_t.empty()) res.median_t_d = median(d_t);
  if (res.stalled_fraction > 0.05 && !opt.allow_invalid)
    throw EnsembleError("ensemble_arrivals: stalled fraction " + std::to_string(res.stalled_fraction) + " > 5%");
  return res;
}

EnsembleResult ensemble_arrivals(const WaveField& psi0, const DetectorRegion& region, double lambda,
                                 const EnsembleOptions& opt) {
  if (!(opt.t_max > 0)) throw ArgumentError("ensemble_arrivals: t_max must be positive");
  // Same scheme for both stores, so λ = 0 gives identical fields.
  const auto wod = SnapshotStore::absorbing(psi0, ComplexPotential::zero(psi0.grid), opt.t_max, opt.evolution,
                                            opt.snapshot_stride_steps);
  const auto wid = SnapshotStore::absorbing(psi0, absorbing_potential(psi0.grid, region, lambda), opt.t_max,
                                            opt.evolution, opt.snapshot_stride_steps);
  DetectionRule rule;
  rule.kind = DetectionRule::Kind::Poisson;
  rule.lambda = lambda;
  return ensemble_arrivals(psi0, region, wod, wid, rule, opt);
}

DelayScaling delay_scaling(const WaveField& psi0, const DetectorRegion& region, const std::vector<double>& lambdas,
                           const EnsembleOptions& opt) {
  if (lambdas.size() < 3) throw ConfigurationError("delay_scaling: need at least 3 lambda values");
  const auto wod = SnapshotStore::absorbing(psi0, ComplexPotential::zero(psi0.grid), opt.t_max, opt.evolution,
                                            opt.snapshot_stride_steps);
  DelayScaling out;
  for (double lambda : lambdas) {
    const auto wid = SnapshotStore::absorbing(psi0, absorbing_potential(psi0.grid, region, lambda), opt.t_max,
                                              opt.evolution, opt.snapshot_stride_steps);
    DetectionRule rule;
    rule.kind = DetectionRule::Kind::Poisson;
    rule.lambda = lambda;
    auto ens = ensemble_arrivals(psi0, region, wod, wid, rule, opt);
    std::vector<double> delay, lag;
    for (const auto& r : ens.records) {
      if (r.stalled || !std::isfinite(r.t_wod) || !std::isfinite(r.t_wid)) continue;
      delay.push_back(std::abs(r.t_wid - r.t_wod));
      if (std::isfinite(r.t_d)) lag.push_back(r.t_d - r.t_wid);
    }
    if (delay.empty() || lag.empty()) throw EnsembleError("delay_scaling: no complete trajectories");
    out.lambdas.push_back(lambda);
    out.median_wid_delay.push_back(median(delay));
    out.mean_detection_lag.push_back(mean(lag));
    out.stalled_fraction.push_back(ens.stalled_fraction);
    out.ensembles.push_back(std::move(ens));
  }
  std::vector<double> inv;
  for (double l : out.lambdas) inv.push_back(1.0 / l);
  out.delay_vs_lambda = loglog_slope(out.lambdas, out.median_wid_delay);
  out.lag_vs_inverse_lambda = loglog_slope(inv, out.mean_detection_lag);
  return out;
}

} // namespace detlab
