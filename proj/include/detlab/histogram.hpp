#pragma once

#include <vector>

#include <Eigen/Core>

#include "detlab/core/fields.hpp"

namespace detlab {

/// Direction bins: the two signs in 1D, or an equal-area sphere partition in
/// 3D (uniform bands in cos θ, each split into equal φ sectors).
class DirectionBinning {
public:
  static DirectionBinning signs();
  static DirectionBinning equal_area(int bands = 8, int sectors = 8);
  static DirectionBinning for_dim(int dim) { return dim == 1 ? signs() : equal_area(); }

  int dim() const { return dim_; }
  int count() const { return dim_ == 1 ? 2 : bands_ * sectors_; }
  int bands() const { return bands_; }
  int sectors() const { return sectors_; }
  int bin_of(const Eigen::Vector3d& u) const;
  Eigen::Vector3d center(int bin) const;
  /// cos θ range and φ range of a 3D bin.
  void bounds(int bin, double& z_lo, double& z_hi, double& phi_lo, double& phi_hi) const;

private:
  int dim_ = 1;
  int bands_ = 1;
  int sectors_ = 2;
};

/// Bin layout over (u, ρ, τ). ρ outside its edges clamps into the end bins;
/// the last τ bin is open to +∞.
struct HistogramAxes {
  DirectionBinning directions;
  std::vector<double> rho_edges;
  std::vector<double> tau_edges;
  double R = 1.0;
  double reference_speed = 1.0;

  static HistogramAxes uniform(const DirectionBinning& dirs, int n_rho, double rho_lo, double rho_hi,
                               int n_tau, double tau_hi, double R, double reference_speed);
  int n_u() const { return directions.count(); }
  int n_rho() const { return static_cast<int>(rho_edges.size()) - 1; }
  int n_tau() const { return static_cast<int>(tau_edges.size()) - 1; }
  int rho_bin(double rho) const;
  int tau_bin(double tau) const;
  double tau_of_time(double t) const { return t * reference_speed / R; }
};

class DetectionHistogram {
public:
  DetectionHistogram() = default;
  explicit DetectionHistogram(HistogramAxes axes);

  const HistogramAxes& axes() const { return axes_; }
  void add(int u_bin, double rho, double tau, double weight);
  void add_bin(int u_bin, int rho_bin, int tau_bin, double weight);
  double weight(int u_bin, int rho_bin, int tau_bin) const;
  const std::vector<double>& weights() const { return weights_; }
  double total() const { return total_; }

  /// Joint (u, τ) marginal, row-major [u][τ].
  std::vector<double> u_tau() const;
  std::vector<double> tau_marginal() const;
  std::vector<double> u_marginal() const;
  std::vector<double> rho_marginal() const;

  /// Exact (unbinned) weighted moments of ρ and of detection time.
  double rho_mean() const;
  double rho_std() const;
  double time_mean() const;

  bool under_capture = false;

private:
  HistogramAxes axes_;
  std::vector<double> weights_;
  double total_ = 0.0;
  double rho_m0_ = 0.0, rho_m1_ = 0.0, rho_m2_ = 0.0, t_m1_ = 0.0;

public:
  void add_moments(double rho, double t, double weight) {
    rho_m0_ += weight;
    rho_m1_ += weight * rho;
    rho_m2_ += weight * rho * rho;
    t_m1_ += weight * t;
  }
  /// For deserialisation: overwrite one bin without touching moments.
  void set_bin(int u_bin, int rho_bin, int tau_bin, double weight);
};

/// ħ k̄ / m with k̄ = ∫|k||Ψ̂|² / ∫|Ψ̂|² on the grid.
double reference_speed(const WaveField& psi0);

} // namespace detlab
