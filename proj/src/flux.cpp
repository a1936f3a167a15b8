#include "detlab/flux.hpp"

#include <cmath>

#include "detlab/core/errors.hpp"
#include "detlab/core/fourier.hpp"
#include "detlab/core/quadrature.hpp"
#include "detlab/core/sampler.hpp"
#include "detlab/propagator.hpp"

namespace detlab {

FluxRecorder::FluxRecorder(const DetectorRegion& region, HistogramAxes axes, int nodes_per_bin)
    : axes_(std::move(axes)), acc_(static_cast<size_t>(axes_.n_u()) * axes_.n_tau(), 0.0) {
  if (region.dim() == 1) {
    for (int b = 0; b < 2; ++b) {
      const Eigen::Vector3d u(b == 1 ? 1.0 : -1.0, 0, 0);
      nodes_.push_back({b, region.R() * u, u, 1.0});
    }
    return;
  }
  const auto& rule = gauss_legendre_rule(nodes_per_bin);
  const double R = region.R();
  for (int b = 0; b < axes_.n_u(); ++b) {
    double zl, zh, pl, ph;
    axes_.directions.bounds(b, zl, zh, pl, ph);
    for (int i = 0; i < nodes_per_bin; ++i)
      for (int j = 0; j < nodes_per_bin; ++j) {
        const double z = 0.5 * (zl + zh) + 0.5 * (zh - zl) * rule.nodes[i];
        const double phi = 0.5 * (pl + ph) + 0.5 * (ph - pl) * rule.nodes[j];
        const double s = std::sqrt(std::max(0.0, 1 - z * z));
        const Eigen::Vector3d u(s * std::cos(phi), s * std::sin(phi), z);
        const Eigen::Vector3d x = region.surface_point(u);
        const double w = 0.25 * (zh - zl) * (ph - pl) * rule.weights[i] * rule.weights[j];
        nodes_.push_back({b, x, region.normal(x), w * R * R * region.area_factor(u)});
      }
  }
}

void FluxRecorder::record(const WaveField& psi, double t, double dt) {
  const FieldSampler sampler(psi);
  const int tau = axes_.tau_bin(axes_.tau_of_time(t));
  std::vector<double> rate(axes_.n_u(), 0.0);
  for (const auto& node : nodes_) {
    const Eigen::Vector3d j = probability_current(sampler(node.x), psi.units);
    rate[node.bin] += node.n.dot(j) * node.dA;
  }
  for (int b = 0; b < axes_.n_u(); ++b) {
    const double c = rate[b] * dt;
    acc_[static_cast<size_t>(b) * axes_.n_tau() + tau] += c;
    if (c < 0) inward_ -= c;
  }
}

FluxDistribution FluxRecorder::result() const {
  FluxDistribution d;
  d.axes = axes_;
  d.u_tau = acc_;
  d.inward = inward_;
  for (double w : acc_) {
    d.net += w;
    if (w < 0) ++d.negative_bins;
  }
  return d;
}

DetectionHistogram FluxDistribution::histogram() const {
  DetectionHistogram h(axes);
  const int rho = axes.rho_bin(1.0);
  for (int u = 0; u < axes.n_u(); ++u)
    for (int t = 0; t < axes.n_tau(); ++t) {
      const double w = u_tau[static_cast<size_t>(u) * axes.n_tau() + t];
      if (w > 0) h.add_bin(u, rho, t, w);
    }
  return h;
}

FluxDistribution flux_distribution(const std::vector<WaveField>& series, const std::vector<double>& times,
                                   const DetectorRegion& region, const HistogramAxes& axes) {
  if (series.size() != times.size() || series.size() < 2)
    throw ArgumentError("flux_distribution: need >= 2 snapshots with matching times");
  FluxRecorder rec(region, axes);
  for (size_t i = 0; i < series.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) throw ArgumentError("flux_distribution: times must increase");
    const double left = i > 0 ? times[i] - times[i - 1] : 0.0;
    const double right = i + 1 < times.size() ? times[i + 1] - times[i] : 0.0;
    rec.record(series[i], times[i], 0.5 * (left + right));
  }
  return rec.result();
}

FluxDistribution free_flux_distribution(const WaveField& psi0, const DetectorRegion& region,
                                        const HistogramAxes& axes, double t_max, double dt) {
  if (!(dt > 0) || !(t_max > dt)) throw ArgumentError("free_flux_distribution: need 0 < dt < t_max");
  FluxRecorder rec(region, axes);
  SpectralField g = forward_transform(psi0);
  apply_free_phase(g, 0.5 * dt);
  const auto steps = static_cast<long>(std::floor(t_max / dt));
  for (long s = 0; s < steps; ++s) {
    rec.record(inverse_transform(g), (s + 0.5) * dt, dt);
    apply_free_phase(g, dt);
  }
  return rec.result();
}

} // namespace detlab
