#pragma once

#include <type_traits>
#include <vector>

#include "detlab/core/errors.hpp"

namespace detlab {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule with n nodes (Newton on P_n, exact to ~1e-15).
const GaussLegendreRule& gauss_legendre_rule(int n);

/// ∫_a^b f with an n-point rule; exact for polynomials of degree ≤ 2n−1.
template <typename F>
auto gauss_quadrature(F&& f, double a, double b, int n) {
  using R = std::decay_t<decltype(f(a))>;
  if (!(a < b)) throw ArgumentError("gauss_quadrature: need a < b");
  const auto& rule = gauss_legendre_rule(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  R sum{};
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

/// Composite rule: `panels` equal sub-intervals of n nodes each.
template <typename F>
auto composite_gauss(F&& f, double a, double b, int n, int panels) {
  using R = std::decay_t<decltype(f(a))>;
  if (!(a < b)) throw ArgumentError("composite_gauss: need a < b");
  if (panels < 1) throw ArgumentError("composite_gauss: need at least one panel");
  const double h = (b - a) / panels;
  R sum{};
  for (int p = 0; p < panels; ++p) sum += gauss_quadrature(f, a + p * h, a + (p + 1) * h, n);
  return sum;
}

/// Flattened nodes/weights of a composite rule, handy for tensor products.
struct QuadratureNodes {
  std::vector<double> x;
  std::vector<double> w;
};
QuadratureNodes composite_nodes(double a, double b, int n, int panels);

} // namespace detlab
