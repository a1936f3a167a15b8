#include "detlab/zeno.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "detlab/core/errors.hpp"
#include "detlab/core/fourier.hpp"
#include "detlab/core/quadrature.hpp"
#include "detlab/core/random.hpp"

namespace detlab {

void ZenoConfig::validate() const {
  if (!(period > 0)) throw ConfigurationError("zeno: period must be positive");
  if (!(sigma1 > 0)) throw ConfigurationError("zeno: sigma1 must be positive");
  if (n_max < 1) throw ConfigurationError("zeno: n_max must be >= 1");
  if (!(c1 > 0) || !(c2 > 0)) throw ConfigurationError("zeno: c1, c2 must be positive");
}

bool ZenoConfig::admissible(double R, double v, const PhysicalUnits& u) const {
  const double lo = c1 * u.hbar * period / (u.mass * R);
  const double hi = c2 * v * v * period * period / R;
  return lo <= sigma1 && sigma1 <= hi;
}

double survive_multiplier(double d, double sigma) { return 0.5 * std::erfc(d / (2 * sigma)); }

double detect_multiplier(double d, double sigma) {
  const double s = 0.5 * std::erfc(d / (2 * sigma));
  const double one_minus = 0.5 * std::erfc(-d / (2 * sigma));
  return std::sqrt(one_minus * (1 + s));
}

PovEffect soft_pov_effect(const WaveField& f, const DetectorRegion& region, double sigma, bool sharp) {
  if (!(sigma > 0) && !sharp) throw DomainError("soft_pov_effect: sigma must be positive");
  PovEffect e{f, f, 0.0};
  for (Index i = 0; i < f.grid.size(); ++i) {
    const Eigen::Vector3d x = f.grid.position(i);
    const double r = x.norm();
    const double edge = r > 0 ? region.R() * region.shape(x / r) : region.R();
    const double d = r - edge;
    double s, q;
    if (sharp) {
      s = d < 0 ? 1.0 : 0.0;
      q = d < 0 ? 0.0 : 1.0;
    } else {
      s = survive_multiplier(d, sigma);
      q = detect_multiplier(d, sigma);
    }
    e.survive.values[i] *= s;
    e.detect.values[i] *= q;
  }
  const double total = f.norm_squared();
  e.p_detect = total > 0 ? e.detect.norm_squared() / total : 0.0;
  return e;
}

double zeno_survival_oracle(const SpectralAmplitude& psihat, const DetectorRegion& region, int n,
                            double period, const PhysicalUnits& u) {
  if (n < 1 || !(period > 0)) throw DomainError("zeno_survival_oracle: need n >= 1, period > 0");
  const double kmax = psihat.k_extent();
  auto cutoff = [&](const Eigen::Vector3d& dir) {
    return std::min(kmax, u.mass * region.R() * region.shape(dir) / (u.hbar * n * period));
  };
  if (psihat.dim() == 1) {
    const double lo = -cutoff({-1, 0, 0}), hi = cutoff({1, 0, 0});
    return composite_gauss([&](double k) { return std::norm(psihat({k, 0, 0})); }, lo, hi, 16, 64);
  }
  const int nphi = 64;
  double total = 0;
  const auto zn = composite_nodes(-1, 1, 8, 8);
  for (size_t i = 0; i < zn.x.size(); ++i) {
    const double z = zn.x[i];
    const double s = std::sqrt(std::max(0.0, 1 - z * z));
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2 * std::numbers::pi * (j + 0.5) / nphi;
      const Eigen::Vector3d dir(s * std::cos(phi), s * std::sin(phi), z);
      const double kc = cutoff(dir);
      const double radial = composite_gauss(
          [&](double k) { return k * k * std::norm(psihat(k * dir)); }, 0.0, kc, 16, 8);
      total += zn.w[i] * (2 * std::numbers::pi / nphi) * radial;
    }
  }
  return total;
}

WidthAudit step_width_audit(const ZenoConfig& z, const DetectorRegion& region, int n, const PhysicalUnits& u) {
  if (n < 1) throw DomainError("step_width_audit: n must be >= 1");
  const double sn = z.sigma(n);
  const double a = u.hbar * z.period / (2 * u.mass * sn);
  WidthAudit w;
  w.width = std::sqrt(sn * sn + a * a);
  w.bound_ratio = w.width / (region.R() / n);
  w.flagged = w.bound_ratio >= 1.0;
  return w;
}

namespace {

struct CellGeometry {
  std::vector<int> u_bin;
  std::vector<double> rho;
};

CellGeometry geometry(const Grid& grid, const DetectorRegion& region, const HistogramAxes& axes) {
  CellGeometry g;
  g.u_bin.resize(grid.size());
  g.rho.resize(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const Eigen::Vector3d x = grid.position(i);
    g.u_bin[i] = x.norm() > 0 ? axes.directions.bin_of(x.normalized()) : 0;
    g.rho[i] = region.scaled_radius(x);
  }
  return g;
}

void run_ledger(const WaveField& psi0, const DetectorRegion& region, const ZenoConfig& z,
                const HistogramAxes& axes, const EvolutionConfig& cfg, ZenoResult& out) {
  const auto geo = geometry(psi0.grid, region, axes);
  const auto oracle = SpectralAmplitude::from_field(forward_transform(psi0));
  const double dV = psi0.grid.cell_volume();
  WaveField f = psi0;
  double survival = f.norm_squared();
  for (int n = 1; n <= z.n_max; ++n) {
    f = evolve_free(f, z.period, cfg.edge_threshold, cfg.edge_band_fraction);
    PovEffect e = soft_pov_effect(f, region, z.sigma(n), z.sharp);
    LedgerRow row;
    row.n = n;
    row.t = n * z.period;
    row.pre_norm = survival;
    row.p_detect = e.p_detect;
    row.p_survive = 1.0 - e.p_detect;
    row.survival = survival * row.p_survive;
    row.oracle = zeno_survival_oracle(oracle, region, n, z.period, psi0.units);
    const auto audit = step_width_audit(z, region, n, psi0.units);
    row.width = audit.width;
    row.bound_ratio = audit.bound_ratio;
    out.ledger.push_back(row);

    const double tau = axes.tau_of_time(row.t);
    for (Index i = 0; i < f.grid.size(); ++i) {
      const double w = std::norm(e.detect.values[i]) * dV;
      if (w > 0) out.histogram.add(geo.u_bin[i], geo.rho[i], tau, w);
    }
    survival = row.survival;
    f = std::move(e.survive);
    if (survival < 1e-14) break;
  }
}

void run_monte_carlo(const WaveField& psi0, const DetectorRegion& region, const ZenoConfig& z,
                     const HistogramAxes& axes, const EvolutionConfig& cfg, int repetitions, int threads,
                     ZenoResult& out) {
  const auto geo = geometry(psi0.grid, region, axes);
  out.detection_times.assign(repetitions, std::numeric_limits<double>::infinity());
  out.detection_points.assign(repetitions, Eigen::Vector3d::Constant(std::nan("")));
  std::vector<Index> cells(repetitions, 0);

  auto one = [&](int rep) {
    RandomStream rng(z.seed, static_cast<std::uint64_t>(rep));
    WaveField f = psi0;
    f.normalize();
    for (int n = 1; n <= z.n_max; ++n) {
      f = evolve_free(f, z.period, cfg.edge_threshold, cfg.edge_band_fraction);
      PovEffect e = soft_pov_effect(f, region, z.sigma(n), z.sharp);
      if (rng.uniform() < e.p_detect) {
        Eigen::ArrayXd cdf = e.detect.values.array().abs2();
        for (Index i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
        const double target = rng.uniform() * cdf[cdf.size() - 1];
        const Index cell = std::upper_bound(cdf.data(), cdf.data() + cdf.size(), target) - cdf.data();
        out.detection_times[rep] = n * z.period;
        out.detection_points[rep] = f.grid.position(std::min<Index>(cell, cdf.size() - 1));
        cells[rep] = std::min<Index>(cell, cdf.size() - 1);
        return;
      }
      f = std::move(e.survive);
      f.normalize();
    }
    cells[rep] = -1;
  };

  const int workers = std::max(1, std::min(threads, repetitions));
  std::mutex m;
  int next = 0;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        int rep;
        {
          std::lock_guard<std::mutex> lock(m);
          if (next >= repetitions) return;
          rep = next++;
        }
        one(rep);
      }
    });
  for (auto& t : pool) t.join();

  // Bin in repetition order so the histogram does not depend on scheduling.
  int undetected = 0;
  for (int rep = 0; rep < repetitions; ++rep) {
    if (cells[rep] < 0) {
      ++undetected;
      continue;
    }
    out.histogram.add(geo.u_bin[cells[rep]], geo.rho[cells[rep]], axes.tau_of_time(out.detection_times[rep]),
                      1.0 / repetitions);
  }
  LedgerRow last;
  last.n = z.n_max;
  last.survival = static_cast<double>(undetected) / repetitions;
  out.ledger.push_back(last);
}

} // namespace

ZenoResult run_zeno(const WaveField& psi0, const DetectorRegion& region, const ZenoConfig& z,
                    const HistogramAxes& axes, const EvolutionConfig& cfg, int repetitions, int threads) {
  z.validate();
  if (region.dim() != psi0.grid.dim()) throw ConfigurationError("run_zeno: dimension mismatch");
  if (mass_outside(psi0, region) > 1e-6)
    throw ConfigurationError("run_zeno: initial state has mass > 1e-6 outside the region");
  if (repetitions < 1) throw ConfigurationError("run_zeno: repetitions must be >= 1");

  ZenoResult out;
  out.histogram = DetectionHistogram(axes);
  if (z.sharp) out.warnings.push_back("sharp projective measurements (diagnostics mode)");
  if (!z.admissible(region.R(), reference_speed(psi0), psi0.units))
    out.warnings.push_back("schedule: sigma1 outside the admissible window");

  if (z.mode == ZenoMode::Ledger) {
    run_ledger(psi0, region, z, axes, cfg, out);
  } else {
    run_monte_carlo(psi0, region, z, axes, cfg, repetitions, threads, out);
  }

  for (const auto& row : out.ledger)
    if (z.mode == ZenoMode::Ledger && row.bound_ratio >= 1.0) {
      out.warnings.push_back("step width bound violated from n = " + std::to_string(row.n));
      break;
    }
  if (!out.ledger.empty() && out.ledger.back().survival > 0.1) {
    out.histogram.under_capture = true;
    out.warnings.push_back("under-capture: survival " + std::to_string(out.ledger.back().survival) +
                           " after the last measurement");
  }
  return out;
}

} // namespace detlab
