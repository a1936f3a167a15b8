#pragma once

#include <vector>

#include "detlab/core/stats.hpp"
#include "detlab/histogram.hpp"

namespace detlab::experiments {

struct Comparison {
  double tv = 0.0;           ///< (u, τ) layout plus the undetected remainder
  ChiSquareResult chi_square;
  KsResult ks_tau;           ///< binned KS on the τ marginals, conditional on detection
  double total_a = 0.0, total_b = 0.0;
  double effective_count = 0.0;
};

/// `a` plays the data, `b` the reference. Inputs with mass above one are read
/// as counts and both sides are scaled to unit mass. The χ² and KS p-values
/// treat `a` as `effective_count` independent detections.
Comparison compare_distributions(std::vector<double> a, std::vector<double> b, int n_tau,
                                 double effective_count = 1e4);
Comparison compare_histograms(const DetectionHistogram& a, const DetectionHistogram& b,
                              double effective_count = 1e4);
/// Same binning up to round-off; throws ArgumentError otherwise.
void check_same_binning(const HistogramAxes& a, const HistogramAxes& b);

} // namespace detlab::experiments
