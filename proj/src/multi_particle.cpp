#include "detlab/multi_particle.hpp"

#include <cmath>

#include "detlab/core/errors.hpp"
#include "detlab/core/sampler.hpp"
#include "detlab/oracles.hpp"
#include "detlab/propagator.hpp"

namespace detlab {

double n_particle_cross_section(const ManyBodySpectral& psihat, int dim,
                                const std::vector<DetectorRegion>& surfaces,
                                const std::vector<ArrivalPoint>& points, const PhysicalUnits& u) {
  if (points.empty() || surfaces.size() != points.size())
    throw ArgumentError("n_particle_cross_section: one surface per point");
  std::vector<Eigen::Vector3d> ks;
  double factor = 1.0;
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const auto& s = surfaces[i];
    if (!(p.t > 0)) throw DomainError("n_particle_cross_section: t_i must be positive");
    if (std::abs(s.scaled_radius(p.x) - 1.0) > 1e-6)
      throw DomainError("n_particle_cross_section: x_i is not on its surface");
    const double nx = s.normal(p.x).dot(p.x);
    if (!(nx > 0)) throw StarShapeError("n_particle_cross_section: n(x)·x <= 0");
    factor *= std::pow(u.mass / u.hbar, dim) * nx / std::pow(p.t, dim + 1);
    ks.push_back(u.mass * p.x / (u.hbar * p.t));
  }
  return factor * std::norm(psihat(ks));
}

ManyBodySpectral product_spectral(const GaussianPacket& a, const GaussianPacket& b) {
  return [a, b](const std::vector<Eigen::Vector3d>& k) { return a.spectral(k[0]) * b.spectral(k[1]); };
}

ManyBodySpectral symmetrized_spectral(const GaussianPacket& a, const GaussianPacket& b) {
  const double norm = std::sqrt(2.0 + 2.0 * std::norm(overlap(a, b)));
  return [a, b, norm](const std::vector<Eigen::Vector3d>& k) {
    return (a.spectral(k[0]) * b.spectral(k[1]) + b.spectral(k[0]) * a.spectral(k[1])) / norm;
  };
}

double povm_factorization_residual(const GaussianPacket& a, const GaussianPacket& b,
                                   const std::array<DetectorRegion, 2>& surfaces,
                                   const std::array<ArrivalPoint, 2>& points, const PhysicalUnits& u) {
  const double joint = n_particle_cross_section(product_spectral(a, b), a.dim(), {surfaces[0], surfaces[1]},
                                                {points[0], points[1]}, u);
  const double sa = cross_section(SpectralAmplitude::from_state(a), surfaces[0], points[0].x, points[0].t, u);
  const double sb = cross_section(SpectralAmplitude::from_state(b), surfaces[1], points[1].x, points[1].t, u);
  const double scale = std::max(std::abs(joint), 1e-300);
  return std::abs(joint - sa * sb) / scale;
}

SeparableTwoBody SeparableTwoBody::product(const GaussianPacket& a, const GaussianPacket& b) {
  if (a.dim() != b.dim()) throw ArgumentError("SeparableTwoBody: dimension mismatch");
  return {a.dim(), {Complex(1.0)}, {{a, b}}};
}

SeparableTwoBody SeparableTwoBody::symmetrized(const GaussianPacket& a, const GaussianPacket& b) {
  if (a.dim() != b.dim()) throw ArgumentError("SeparableTwoBody: dimension mismatch");
  const double c = 1.0 / std::sqrt(2.0 + 2.0 * std::norm(overlap(a, b)));
  return {a.dim(), {Complex(c), Complex(c)}, {{a, b}, {b, a}}};
}

namespace {

struct Local {
  Complex value;
  Complex normal_derivative;
};

/// φ and n·∇φ for one Gaussian product evolved to time t.
Local evaluate_factor(const GaussianPacket& g, const Eigen::Vector3d& x, const Eigen::Vector3d& n, double t,
                      const Grid& axis_grid, const PhysicalUnits& u) {
  std::array<Complex, 3> val{}, der{};
  for (int a = 0; a < g.dim(); ++a) {
    const GaussianPacket axis(1, {g.axes()[a], GaussianAxis{}, GaussianAxis{}});
    const WaveField f = evolve_free(PacketState(axis).sample(axis_grid, u), t);
    const auto s = FieldSampler(f)({x[a], 0, 0});
    val[a] = s.value;
    der[a] = s.gradient[0];
  }
  Local out{1.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) out.value *= val[a];
  for (int a = 0; a < g.dim(); ++a) {
    Complex term = n[a] * der[a];
    for (int b = 0; b < g.dim(); ++b)
      if (b != a) term *= val[b];
    out.normal_derivative += term;
  }
  return out;
}

} // namespace

double multi_time_sigma(const SeparableTwoBody& state, const std::array<DetectorRegion, 2>& surfaces,
                        const std::array<ArrivalPoint, 2>& points, const Grid& axis_grid, const PhysicalUnits& u) {
  if (axis_grid.dim() != 1) throw ArgumentError("multi_time_sigma: axis grid must be 1D");
  std::array<Eigen::Vector3d, 2> normals;
  for (int p = 0; p < 2; ++p) {
    if (!(points[p].t > 0)) throw DomainError("multi_time_sigma: t_i must be positive");
    if (std::abs(surfaces[p].scaled_radius(points[p].x) - 1.0) > 1e-6)
      throw DomainError("multi_time_sigma: x_i is not on its surface");
    normals[p] = surfaces[p].normal(points[p].x);
  }
  Complex phi = 0, d1 = 0, d2 = 0, d12 = 0;
  for (size_t r = 0; r < state.terms.size(); ++r) {
    const Local a = evaluate_factor(state.terms[r][0], points[0].x, normals[0], points[0].t, axis_grid, u);
    const Local b = evaluate_factor(state.terms[r][1], points[1].x, normals[1], points[1].t, axis_grid, u);
    const Complex c = state.coeffs[r];
    phi += c * a.value * b.value;
    d1 += c * a.normal_derivative * b.value;
    d2 += c * a.value * b.normal_derivative;
    d12 += c * a.normal_derivative * b.normal_derivative;
  }
  const Complex bracket = std::conj(phi) * d12 - std::conj(d2) * d1 - std::conj(d1) * d2 + std::conj(d12) * phi;
  return std::real(-u.hbar * u.hbar / (4 * u.mass * u.mass) * bracket);
}

} // namespace detlab
