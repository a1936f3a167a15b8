#pragma once

#include <vector>

#include "detlab/detector_region.hpp"
#include "detlab/histogram.hpp"

namespace detlab {

/// Signed (u, τ) distribution of ∫ n·j dA dt across ∂Ω.
struct FluxDistribution {
  HistogramAxes axes;
  std::vector<double> u_tau;    ///< row-major [u][τ], signed
  double net = 0.0;
  double inward = 0.0;          ///< total magnitude of negative contributions
  int negative_bins = 0;

  /// Positive part in a DetectionHistogram (ρ = 1).
  DetectionHistogram histogram() const;
};

class FluxRecorder {
public:
  FluxRecorder(const DetectorRegion& region, HistogramAxes axes, int nodes_per_bin = 4);

  /// Adds n·j dA · dt for a field snapshot at time t.
  void record(const WaveField& psi, double t, double dt);
  FluxDistribution result() const;

private:
  struct Node {
    int bin;
    Eigen::Vector3d x, n;
    double dA;
  };
  HistogramAxes axes_;
  std::vector<Node> nodes_;
  std::vector<double> acc_;
  double inward_ = 0.0;
};

/// Snapshots psi[i] at times[i], each weighted by the trapezoid rule.
FluxDistribution flux_distribution(const std::vector<WaveField>& series, const std::vector<double>& times,
                                   const DetectorRegion& region, const HistogramAxes& axes);

/// Free evolution sampled at (s + ½)dt up to t_max.
FluxDistribution free_flux_distribution(const WaveField& psi0, const DetectorRegion& region,
                                        const HistogramAxes& axes, double t_max, double dt);

} // namespace detlab
