#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "detlab/core/random.hpp"
#include "detlab/core/sampler.hpp"
#include "detlab/core/stats.hpp"
#include "detlab/detector_region.hpp"
#include "detlab/propagator.hpp"
#include "detlab/zeno.hpp"

namespace detlab {

/// Time-ordered field snapshots with linear interpolation in time. Equal
/// consecutive times mark a jump (a collapse); the later entry wins at that t.
class SnapshotStore {
public:
  /// Exact free evolution sampled every `stride`.
  static SnapshotStore free(const WaveField& psi0, double t_max, double stride);
  /// Split-step evolution under v; a snapshot every `stride_steps` kicks,
  /// each half-kicked so it approximates Ψ at the kick time.
  static SnapshotStore absorbing(const WaveField& psi0, const ComplexPotential& v, double t_max,
                                 const EvolutionConfig& cfg, int stride_steps = 10);
  /// Survive branch of the Zeno protocol, `per_period` snapshots between measurements.
  static SnapshotStore zeno(const WaveField& psi0, const DetectorRegion& region, const ZenoConfig& z,
                            const EvolutionConfig& cfg, int per_period = 20);

  double t_max() const { return times_.back(); }
  size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const WaveField& snapshot(size_t i) const { return fields_[i]; }

  struct Velocity {
    Eigen::Vector3d v;
    bool below_floor = false;
  };
  /// (ħ/m) Im(∇Ψ/Ψ) with Ψ, ∇Ψ interpolated linearly in time.
  Velocity velocity(const Eigen::Vector3d& x, double t) const;
  double density(const Eigen::Vector3d& x, double t) const;

  /// Relative density floor (fraction of the snapshot peak).
  double floor_fraction = 1e-12;

private:
  void push(double t, WaveField f);
  std::vector<double> times_;
  std::vector<WaveField> fields_;
  std::vector<double> peaks_;
};

struct Crossing {
  double t = std::numeric_limits<double>::infinity();
  Eigen::Vector3d x = Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN());
  bool found() const { return std::isfinite(t); }
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::Vector3d> q;
  Crossing first_exit;     ///< first crossing of ∂Ω
  Crossing detection;      ///< T_D, X_D when a clock is attached
  bool reentered = false;  ///< came back into Ω before detection
  bool stalled = false;
};

/// Detection clock attached to a trajectory.
struct DetectionRule {
  enum class Kind { None, Poisson, Zeno } kind = Kind::None;
  double lambda = 0.0;        ///< Poisson: rate 2λ/ħ while in Ω^c
  ZenoConfig zeno;            ///< Zeno: detect at n𝒯 w.p. 1 − s_n(Q)²
};

struct TrajectoryOptions {
  double dt = 0.05;
  double t_max = std::numeric_limits<double>::infinity();  ///< capped by the store
  bool keep_path = false;
  bool stop_at_exit = false;       ///< stop once ∂Ω is crossed (T_WOD runs)
};

/// RK4 on dQ/dt = j/|Ψ|² with velocities from `store`. `clock_draw` is the
/// Exp(1) (Poisson) or the uniform stream (Zeno) for the detection rule.
Trajectory integrate_trajectory(const SnapshotStore& store, const DetectorRegion& region,
                                const Eigen::Vector3d& q0, const TrajectoryOptions& opt,
                                const DetectionRule& rule = {}, RandomStream* rng = nullptr);

struct ArrivalRecord {
  double t_wod, t_wid, t_d;
  Eigen::Vector3d x_wod, x_wid, x_d;
  bool reentered = false;
  bool stalled = false;
};

struct EnsembleOptions {
  int n_traj = 2000;
  std::uint64_t seed = 1;
  double t_max = 0.0;
  TrajectoryOptions trajectory;
  EvolutionConfig evolution;
  int snapshot_stride_steps = 10;
  int threads = 1;
  bool allow_invalid = false;      ///< otherwise > 5% stalled throws EnsembleError
};

struct EnsembleResult {
  std::vector<ArrivalRecord> records;
  double stalled_fraction = 0.0;
  double median_t_wod = 0.0, median_t_wid = 0.0, median_t_d = 0.0;
};

/// Initial positions from |Ψ₀|²: cell chosen by inverse CDF, uniform within the cell.
std::vector<Eigen::Vector3d> sample_positions(const WaveField& psi0, int n, RandomStream& rng);

/// WOD and WID trajectories from common starting points. A `wod` store may be
/// shared across several WID runs.
EnsembleResult ensemble_arrivals(const WaveField& psi0, const DetectorRegion& region, const SnapshotStore& wod,
                                 const SnapshotStore& wid, const DetectionRule& rule, const EnsembleOptions& opt);

/// Convenience: builds the free and absorbing stores.
EnsembleResult ensemble_arrivals(const WaveField& psi0, const DetectorRegion& region, double lambda,
                                 const EnsembleOptions& opt);

struct DelayScaling {
  std::vector<double> lambdas;
  std::vector<double> median_wid_delay;  ///< median |T_WID − T_WOD|
  std::vector<double> mean_detection_lag; ///< mean (T_D − T_WID)
  std::vector<double> stalled_fraction;
  SlopeFit delay_vs_lambda;
  SlopeFit lag_vs_inverse_lambda;
  std::vector<EnsembleResult> ensembles;  ///< one per λ, in order
};

DelayScaling delay_scaling(const WaveField& psi0, const DetectorRegion& region, const std::vector<double>& lambdas,
                           const EnsembleOptions& opt);

} // namespace detlab
