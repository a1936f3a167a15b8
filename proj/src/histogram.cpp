#include "detlab/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "detlab/core/errors.hpp"
#include "detlab/core/fourier.hpp"

namespace detlab {

DirectionBinning DirectionBinning::signs() { return DirectionBinning{}; }

DirectionBinning DirectionBinning::equal_area(int bands, int sectors) {
  if (bands < 1 || sectors < 1) throw ConfigurationError("direction binning needs >= 1 band and sector");
  DirectionBinning b;
  b.dim_ = 3;
  b.bands_ = bands;
  b.sectors_ = sectors;
  return b;
}

int DirectionBinning::bin_of(const Eigen::Vector3d& u) const {
  if (dim_ == 1) return u.x() >= 0 ? 1 : 0;
  const double z = std::clamp(u.z(), -1.0, 1.0);
  int band = static_cast<int>((z + 1.0) * 0.5 * bands_);
  band = std::clamp(band, 0, bands_ - 1);
  double phi = std::atan2(u.y(), u.x());
  if (phi < 0) phi += 2 * std::numbers::pi;
  int sector = static_cast<int>(phi / (2 * std::numbers::pi) * sectors_);
  sector = std::clamp(sector, 0, sectors_ - 1);
  return band * sectors_ + sector;
}

void DirectionBinning::bounds(int bin, double& z_lo, double& z_hi, double& phi_lo,
                              double& phi_hi) const {
  const int band = bin / sectors_, sector = bin % sectors_;
  z_lo = -1.0 + 2.0 * band / bands_;
  z_hi = -1.0 + 2.0 * (band + 1) / bands_;
  phi_lo = 2 * std::numbers::pi * sector / sectors_;
  phi_hi = 2 * std::numbers::pi * (sector + 1) / sectors_;
}

Eigen::Vector3d DirectionBinning::center(int bin) const {
  if (dim_ == 1) return {bin == 1 ? 1.0 : -1.0, 0.0, 0.0};
  double zl, zh, pl, ph;
  bounds(bin, zl, zh, pl, ph);
  const double z = 0.5 * (zl + zh), phi = 0.5 * (pl + ph);
  const double r = std::sqrt(std::max(0.0, 1 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

HistogramAxes HistogramAxes::uniform(const DirectionBinning& dirs, int n_rho, double rho_lo,
                                     double rho_hi, int n_tau, double tau_hi, double R,
                                     double reference_speed) {
  if (n_rho < 1 || n_tau < 1 || !(rho_hi > rho_lo) || !(tau_hi > 0) || !(R > 0) ||
      !(reference_speed > 0))
    throw ConfigurationError("invalid histogram axes");
  HistogramAxes a;
  a.directions = dirs;
  a.R = R;
  a.reference_speed = reference_speed;
  for (int i = 0; i <= n_rho; ++i) a.rho_edges.push_back(rho_lo + (rho_hi - rho_lo) * i / n_rho);
  for (int i = 0; i <= n_tau; ++i) a.tau_edges.push_back(tau_hi * i / n_tau);
  return a;
}

namespace {
int locate(const std::vector<double>& edges, double v) {
  const int n = static_cast<int>(edges.size()) - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  const int idx = static_cast<int>(it - edges.begin()) - 1;
  return std::clamp(idx, 0, n - 1);
}
} // namespace

int HistogramAxes::rho_bin(double rho) const { return locate(rho_edges, rho); }
int HistogramAxes::tau_bin(double tau) const { return locate(tau_edges, tau); }

DetectionHistogram::DetectionHistogram(HistogramAxes axes)
    : axes_(std::move(axes)),
      weights_(static_cast<size_t>(axes_.n_u()) * axes_.n_rho() * axes_.n_tau(), 0.0) {}

void DetectionHistogram::add_bin(int u, int r, int t, double w) {
  if (w < 0) throw ArgumentError("histogram weights must be non-negative");
  weights_[(static_cast<size_t>(u) * axes_.n_rho() + r) * axes_.n_tau() + t] += w;
  total_ += w;
}

void DetectionHistogram::set_bin(int u, int r, int t, double w) {
  double& slot = weights_[(static_cast<size_t>(u) * axes_.n_rho() + r) * axes_.n_tau() + t];
  total_ += w - slot;
  slot = w;
}

void DetectionHistogram::add(int u_bin, double rho, double tau, double w) {
  add_bin(u_bin, axes_.rho_bin(rho), axes_.tau_bin(tau), w);
  add_moments(rho, tau * axes_.R / axes_.reference_speed, w);
}

double DetectionHistogram::weight(int u, int r, int t) const {
  return weights_[(static_cast<size_t>(u) * axes_.n_rho() + r) * axes_.n_tau() + t];
}

std::vector<double> DetectionHistogram::u_tau() const {
  std::vector<double> out(static_cast<size_t>(axes_.n_u()) * axes_.n_tau(), 0.0);
  for (int u = 0; u < axes_.n_u(); ++u)
    for (int r = 0; r < axes_.n_rho(); ++r)
      for (int t = 0; t < axes_.n_tau(); ++t) out[static_cast<size_t>(u) * axes_.n_tau() + t] += weight(u, r, t);
  return out;
}

std::vector<double> DetectionHistogram::tau_marginal() const {
  std::vector<double> out(axes_.n_tau(), 0.0);
  for (int u = 0; u < axes_.n_u(); ++u)
    for (int r = 0; r < axes_.n_rho(); ++r)
      for (int t = 0; t < axes_.n_tau(); ++t) out[t] += weight(u, r, t);
  return out;
}

std::vector<double> DetectionHistogram::u_marginal() const {
  std::vector<double> out(axes_.n_u(), 0.0);
  for (int u = 0; u < axes_.n_u(); ++u)
    for (int r = 0; r < axes_.n_rho(); ++r)
      for (int t = 0; t < axes_.n_tau(); ++t) out[u] += weight(u, r, t);
  return out;
}

std::vector<double> DetectionHistogram::rho_marginal() const {
  std::vector<double> out(axes_.n_rho(), 0.0);
  for (int u = 0; u < axes_.n_u(); ++u)
    for (int r = 0; r < axes_.n_rho(); ++r)
      for (int t = 0; t < axes_.n_tau(); ++t) out[r] += weight(u, r, t);
  return out;
}

double DetectionHistogram::rho_mean() const { return rho_m0_ > 0 ? rho_m1_ / rho_m0_ : 0.0; }

double DetectionHistogram::rho_std() const {
  if (rho_m0_ <= 0) return 0.0;
  const double m = rho_m1_ / rho_m0_;
  return std::sqrt(std::max(0.0, rho_m2_ / rho_m0_ - m * m));
}

double DetectionHistogram::time_mean() const { return rho_m0_ > 0 ? t_m1_ / rho_m0_ : 0.0; }

double reference_speed(const WaveField& psi0) {
  const SpectralField g = forward_transform(psi0);
  double num = 0, den = 0;
  for (Index i = 0; i < g.values.size(); ++i) {
    const double w = std::norm(g.values[i]);
    num += g.grid.wavevector(i).norm() * w;
    den += w;
  }
  if (!(den > 0)) throw DomainError("reference_speed: zero field");
  return psi0.units.hbar * (num / den) / psi0.units.mass;
}

} // namespace detlab
