#include "detlab/core/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace detlab {

namespace {

GaussLegendreRule build_rule(int n) {
  GaussLegendreRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

} // namespace

const GaussLegendreRule& gauss_legendre_rule(int n) {
  if (n < 1) throw ArgumentError("gauss_legendre_rule: need n >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(build_rule(n));
  return *slot;
}

QuadratureNodes composite_nodes(double a, double b, int n, int panels) {
  if (!(a < b)) throw ArgumentError("composite_nodes: need a < b");
  const auto& rule = gauss_legendre_rule(n);
  QuadratureNodes q;
  q.x.reserve(static_cast<size_t>(n) * panels);
  q.w.reserve(static_cast<size_t>(n) * panels);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h, half = 0.5 * h;
    for (int i = 0; i < n; ++i) {
      q.x.push_back(lo + half * (1.0 + rule.nodes[i]));
      q.w.push_back(half * rule.weights[i]);
    }
  }
  return q;
}

} // namespace detlab
