#include "detlab/experiments/compare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detlab/core/errors.hpp"
#include "detlab/oracles.hpp"

namespace detlab::experiments {

namespace {

bool close(double x, double y) {
  if (std::isinf(x) || std::isinf(y)) return x == y;
  return std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)});
}

bool same_edges(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!close(a[i], b[i])) return false;
  return true;
}

} // namespace

void check_same_binning(const HistogramAxes& a, const HistogramAxes& b) {
  if (a.n_u() != b.n_u() || a.directions.dim() != b.directions.dim() ||
      a.directions.bands() != b.directions.bands())
    throw ArgumentError("compare: direction binnings differ");
  if (!same_edges(a.tau_edges, b.tau_edges)) throw ArgumentError("compare: tau edges differ");
}

Comparison compare_distributions(std::vector<double> a, std::vector<double> b, int n_tau, double effective_count) {
  if (a.size() != b.size() || a.empty()) throw ArgumentError("compare: layouts differ");
  if (n_tau < 1 || a.size() % static_cast<size_t>(n_tau) != 0) throw ArgumentError("compare: bad tau count");
  if (!(effective_count > 0)) throw ArgumentError("compare: effective count must be positive");
  for (double x : a)
    if (!(x >= 0)) throw ArgumentError("compare: negative or non-finite weight");
  for (double x : b)
    if (!(x >= 0)) throw ArgumentError("compare: negative or non-finite weight");

  Comparison c;
  c.effective_count = effective_count;
  c.total_a = std::accumulate(a.begin(), a.end(), 0.0);
  c.total_b = std::accumulate(b.begin(), b.end(), 0.0);
  if (c.total_a > 1 + 1e-9 || c.total_b > 1 + 1e-9) {
    for (double& x : a) x /= c.total_a;
    for (double& x : b) x /= c.total_b;
  }
  c.tv = std::clamp(tv_to_oracle(a, b), 0.0, 1.0);

  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (sa > 0 && sb > 0) {
    std::vector<double> counts, probs;
    for (size_t i = 0; i < a.size(); ++i) {
      counts.push_back(a[i] / sa * effective_count);
      probs.push_back(b[i] / sb);
    }
    c.chi_square = chi_square_test(counts, probs);

    std::vector<double> ta(n_tau, 0.0), tb(n_tau, 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
      ta[i % n_tau] += a[i] / sa;
      tb[i % n_tau] += b[i] / sb;
    }
    double fa = 0, fb = 0, d = 0;
    for (int j = 0; j < n_tau; ++j) {
      fa += ta[j];
      fb += tb[j];
      d = std::max(d, std::abs(fa - fb));
    }
    c.ks_tau = {d, ks_pvalue(d, effective_count)};
  }
  return c;
}

Comparison compare_histograms(const DetectionHistogram& a, const DetectionHistogram& b, double effective_count) {
  check_same_binning(a.axes(), b.axes());
  return compare_distributions(a.u_tau(), b.u_tau(), a.axes().n_tau(), effective_count);
}

} // namespace detlab::experiments
