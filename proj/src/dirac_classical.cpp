#include <cmath>

#include "detlab/core/errors.hpp"
#include "detlab/core/stats.hpp"
#include "detlab/dirac.hpp"
#include "detlab/histogram.hpp"

namespace detlab {

std::vector<Eigen::Vector3d> sample_velocities(const Eigen::Vector3d& k0, double sigma_k, int n, RandomStream& rng,
                                               const PhysicalUnits& u) {
  if (!(sigma_k > 0) || n < 0) throw ArgumentError("sample_velocities: bad arguments");
  std::vector<Eigen::Vector3d> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d k;
    for (int a = 0; a < 3; ++a) k[a] = k0[a] + sigma_k * rng.normal();
    out.push_back(u.c * u.c * k / dirac_omega(k, u));
  }
  return out;
}

double velocity_density(const DiracProfile& psihat, const Eigen::Vector3d& v, const PhysicalUnits& u) {
  const double beta2 = v.squaredNorm() / (u.c * u.c);
  if (!(beta2 < 1)) return 0.0;
  const double gamma = 1 / std::sqrt(1 - beta2);
  const Eigen::Vector3d k = u.mass * gamma * v / u.hbar;
  return std::pow(u.mass / u.hbar, 3) * std::pow(gamma, 5) * psihat(k).squaredNorm();
}

double sigma_classical(const DiracProfile& psihat, const Eigen::Vector4d& x, const Eigen::Vector4d& n_lower,
                       const PhysicalUnits& u) {
  if (!(x[0] > 0) || !(minkowski_norm(x) > 0)) return 0.0;
  const double nx = n_lower.dot(x);
  if (!(nx > 0)) throw StarShapeError("sigma_classical: n_mu x^mu <= 0");
  return std::pow(u.c, 4) * nx / std::pow(x[0], 4) * velocity_density(psihat, u.c * x.tail<3>() / x[0], u);
}

double SpacetimeSurface::hit_time(const Eigen::Vector3d& v, double c) const {
  Eigen::Vector4d w;
  w << c, v;
  const double f = gauge(w);
  if (!(f > 0)) throw ConfigurationError("spacetime surface: gauge must be positive on future directions");
  return 1.0 / f;
}

void SpacetimeSurface::check_star_shaped(const std::vector<Eigen::Vector3d>& velocities, double c) const {
  for (const auto& v : velocities) (void)hit_time(v, c);
}

SpacetimeSurface sphere_surface(double R) {
  if (!(R > 0)) throw ConfigurationError("sphere_surface: R must be positive");
  return {[R](const Eigen::Vector4d& x) { return x.tail<3>().norm() / R; }};
}

SpacetimeSurface capped_sphere_surface(double R, double T, double c) {
  if (!(R > 0) || !(T > 0)) throw ConfigurationError("capped_sphere_surface: R, T must be positive");
  return {[R, T, c](const Eigen::Vector4d& x) { return std::max(x.tail<3>().norm() / R, x[0] / (c * T)); }};
}

std::vector<CrossingSample> classical_crossings(const std::vector<Eigen::Vector3d>& velocities,
                                                const SpacetimeSurface& surface, double c) {
  std::vector<CrossingSample> out;
  out.reserve(velocities.size());
  for (const auto& v : velocities) {
    const double t = surface.hit_time(v, c);
    out.push_back({t, t * v});
  }
  return out;
}

namespace {

/// Past-region histogram: direction × time bins before t_sigma, plus one
/// bin for everything at or after t_sigma.
std::vector<double> past_histogram(const std::vector<CrossingSample>& xs, double t_sigma) {
  const auto dirs = DirectionBinning::equal_area(4, 4);
  const int nt = 8;
  std::vector<double> h(dirs.count() * nt + 1, 0.0);
  for (const auto& s : xs) {
    if (!(s.t < t_sigma) || s.x.norm() == 0) {
      h.back() += 1;
      continue;
    }
    const int tb = std::min(nt - 1, static_cast<int>(s.t / t_sigma * nt));
    h[dirs.bin_of(s.x.normalized()) * nt + tb] += 1;
  }
  return h;
}

} // namespace

NoSignalingReport no_signaling_check(const Eigen::Vector3d& k0, double sigma_k, const SpacetimeSurface& a,
                                     const SpacetimeSurface& b, double t_sigma, int n, std::uint64_t seed,
                                     const PhysicalUnits& u) {
  if (n < 1 || !(t_sigma > 0)) throw ArgumentError("no_signaling_check: bad arguments");
  RandomStream ra(seed, 1), rb(seed, 2);
  const auto va = sample_velocities(k0, sigma_k, n, ra, u);
  const auto vb = sample_velocities(k0, sigma_k, n, rb, u);
  a.check_star_shaped(va, u.c);
  b.check_star_shaped(vb, u.c);
  const auto ha = past_histogram(classical_crossings(va, a, u.c), t_sigma);
  const auto hb = past_histogram(classical_crossings(vb, b, u.c), t_sigma);

  NoSignalingReport rep;
  rep.past_fraction_a = 1.0 - ha.back() / n;
  rep.past_fraction_b = 1.0 - hb.back() / n;
  const double var = (rep.past_fraction_a * (1 - rep.past_fraction_a) + rep.past_fraction_b * (1 - rep.past_fraction_b)) / n;
  rep.z_score = var > 0 ? (rep.past_fraction_a - rep.past_fraction_b) / std::sqrt(var) : 0.0;
  rep.chi_square_p = chi_square_homogeneity(ha, hb).p_value;
  std::vector<double> pa(ha), pb(hb);
  for (auto& w : pa) w /= n;
  for (auto& w : pb) w /= n;
  rep.tv = total_variation(pa, pb);

  // Paired: the same velocities through both surfaces.
  const auto xa = classical_crossings(va, a, u.c);
  const auto xb = classical_crossings(va, b, u.c);
  int differ = 0;
  for (int i = 0; i < n; ++i) {
    const bool pa_i = xa[i].t < t_sigma, pb_i = xb[i].t < t_sigma;
    if (pa_i != pb_i || (pa_i && (xa[i].t != xb[i].t || xa[i].x != xb[i].x))) ++differ;
  }
  rep.paired_difference = static_cast<double>(differ) / n;
  return rep;
}

} // namespace detlab
