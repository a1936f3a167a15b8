#include "detlab/oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "detlab/core/errors.hpp"
#include "detlab/core/quadrature.hpp"

namespace detlab {

namespace {

constexpr double pi = std::numbers::pi;

Complex free_prefactor(int dim, double t, const PhysicalUnits& u) {
  return std::pow(Complex(0.0, -u.mass / (u.hbar * t)), 0.5 * dim);
}

void require_on_surface(const DetectorRegion& region, const Eigen::Vector3d& x) {
  if (std::abs(region.scaled_radius(x) - 1.0) > 1e-6)
    throw DomainError("cross_section: x is not on the boundary");
}

/// Time integral of σ at direction u between t_a and t_b, via q = 1/t.
double time_integral(const SpectralAmplitude& psihat, const DetectorRegion& region,
                     const Eigen::Vector3d& u, double t_a, double t_b, const PhysicalUnits& units) {
  const Eigen::Vector3d x = region.surface_point(u);
  const double r = x.norm();
  // σ ∝ |Ψ̂(m x q / ħ)|²: beyond q_cut the spectrum is negligible.
  const double q_cut = units.hbar * psihat.k_extent() / (units.mass * r);
  const double q_lo = std::isfinite(t_b) ? 1.0 / t_b : 0.0;
  const double q_hi = std::min(t_a > 0 ? 1.0 / t_a : q_cut, q_cut);
  if (!(q_hi > q_lo)) return 0.0;
  const int panels = std::max(4, static_cast<int>(std::ceil(16 * (q_hi - q_lo) / q_cut)));
  return composite_gauss(
      [&](double q) {
        if (q <= 0) return 0.0;
        const double t = 1.0 / q;
        return cross_section(psihat, region, x, t, units) / (q * q);
      },
      q_lo, q_hi, 24, panels);
}

} // namespace

Complex asymptotic_free_wave(const SpectralAmplitude& psihat, const Eigen::Vector3d& x, double t,
                             const PhysicalUnits& u) {
  if (!(t > 0)) throw DomainError("asymptotic_free_wave: t must be positive");
  const Eigen::Vector3d k = u.mass * x / (u.hbar * t);
  const double omega = u.hbar * k.squaredNorm() / (2 * u.mass);
  return free_prefactor(psihat.dim(), t, u) * psihat(k) * std::polar(1.0, k.dot(x) - omega * t);
}

double cross_section(const SpectralAmplitude& psihat, const DetectorRegion& region,
                     const Eigen::Vector3d& x, double t, const PhysicalUnits& u) {
  if (!(t > 0)) throw DomainError("cross_section: t must be positive");
  require_on_surface(region, x);
  const double nx = region.normal(x).dot(x);
  if (!(nx > 0)) throw StarShapeError("cross_section: n(x)·x <= 0");
  const int d = psihat.dim();
  const Eigen::Vector3d k = u.mass * x / (u.hbar * t);
  return std::pow(u.mass / u.hbar, d) * nx / std::pow(t, d + 1) * std::norm(psihat(k));
}

double cross_section_mass(const SpectralAmplitude& psihat, const DetectorRegion& region,
                          const DirectionBinning& dirs, int u_bin, double t_a, double t_b,
                          const PhysicalUnits& u) {
  if (region.dim() == 1) {
    const Eigen::Vector3d dir(u_bin == 1 ? 1.0 : -1.0, 0, 0);
    return time_integral(psihat, region, dir, t_a, t_b, u);
  }
  double zl, zh, pl, ph;
  dirs.bounds(u_bin, zl, zh, pl, ph);
  const int nz = 6, np = 6;
  const auto& rule = gauss_legendre_rule(nz);
  const auto& rulep = gauss_legendre_rule(np);
  const double R = region.R();
  double sum = 0;
  for (int i = 0; i < nz; ++i) {
    const double z = 0.5 * (zl + zh) + 0.5 * (zh - zl) * rule.nodes[i];
    const double wz = 0.5 * (zh - zl) * rule.weights[i];
    const double s = std::sqrt(std::max(0.0, 1 - z * z));
    for (int j = 0; j < np; ++j) {
      const double phi = 0.5 * (pl + ph) + 0.5 * (ph - pl) * rulep.nodes[j];
      const double wp = 0.5 * (ph - pl) * rulep.weights[j];
      const Eigen::Vector3d dir(s * std::cos(phi), s * std::sin(phi), z);
      const double dA = R * R * region.area_factor(dir);
      sum += wz * wp * dA * time_integral(psihat, region, dir, t_a, t_b, u);
    }
  }
  return sum;
}

double integrate_cross_section(const SpectralAmplitude& psihat, const DetectorRegion& region,
                               const PhysicalUnits& u) {
  const double inf = std::numeric_limits<double>::infinity();
  if (region.dim() == 1) {
    const auto dirs = DirectionBinning::signs();
    return cross_section_mass(psihat, region, dirs, 0, 0, inf, u) +
           cross_section_mass(psihat, region, dirs, 1, 0, inf, u);
  }
  const auto dirs = DirectionBinning::equal_area(6, 6);
  double s = 0;
  for (int b = 0; b < dirs.count(); ++b) s += cross_section_mass(psihat, region, dirs, b, 0, inf, u);
  return s;
}

std::vector<double> binned_cross_section(const SpectralAmplitude& psihat, const DetectorRegion& region,
                                         const HistogramAxes& axes, const PhysicalUnits& u) {
  const int nu = axes.n_u(), nt = axes.n_tau();
  std::vector<double> out(static_cast<size_t>(nu) * nt, 0.0);
  const double to_time = axes.R / axes.reference_speed;
  for (int b = 0; b < nu; ++b)
    for (int t = 0; t < nt; ++t) {
      const double ta = axes.tau_edges[t] * to_time;
      const double tb = t + 1 == nt ? std::numeric_limits<double>::infinity()
                                    : axes.tau_edges[t + 1] * to_time;
      out[static_cast<size_t>(b) * nt + t] = cross_section_mass(psihat, region, axes.directions, b, ta, tb, u);
    }
  return out;
}

double tv_to_oracle(const std::vector<double>& empirical, const std::vector<double>& oracle) {
  if (empirical.size() != oracle.size()) throw ArgumentError("tv_to_oracle: layout mismatch");
  double se = 0, so = 0, d = 0;
  for (size_t i = 0; i < oracle.size(); ++i) {
    se += empirical[i];
    so += oracle[i];
    d += std::abs(empirical[i] - oracle[i]);
  }
  d += std::abs((1 - se) - (1 - so));
  return 0.5 * d;
}

StepScattering step_coefficients(double k, double lambda, const PhysicalUnits& u) {
  if (!(k > 0) || !(lambda >= 0)) throw DomainError("step_coefficients: need k > 0, lambda >= 0");
  StepScattering s;
  s.k = k;
  s.lambda = lambda;
  s.K = std::sqrt(Complex(k * k, 2 * u.mass * lambda / (u.hbar * u.hbar)));
  s.B = (k - s.K) / (k + s.K);
  s.C = 2 * k / (k + s.K);
  return s;
}

double matching_residual(const StepScattering& s) {
  return std::max(std::abs(1.0 + s.B - s.C), std::abs(s.k * (1.0 - s.B) - s.K * s.C) / s.k);
}

Complex reflected_wave(const SpectralAmplitude& psihat, const Eigen::Vector3d& x, double t, double R,
                       double lambda, const PhysicalUnits& u) {
  const double r = x.norm();
  if (!(t > 0) || !(r > 0) || !(r < R)) throw DomainError("reflected_wave: need 0 < |x| < R, t > 0");
  const int d = psihat.dim();
  const Eigen::Vector3d xhat = x / r;
  const Eigen::Vector3d kp = (u.mass / u.hbar) * ((2 * R - r) / t) * xhat;
  const double kn = kp.norm();
  const double omega = u.hbar * kn * kn / (2 * u.mass);
  const Complex B = step_coefficients(kn, lambda, u).B;
  const double geometric = std::pow((2 * R - r) / r, 0.5 * (d - 1));
  return free_prefactor(d, t, u) * B * geometric * psihat(kp) *
         std::polar(1.0, 2 * kn * R - kp.dot(x) - omega * t);
}

Complex transmitted_wave(const SpectralAmplitude& psihat, const Eigen::Vector3d& x, double t, double R,
                         double lambda, const PhysicalUnits& u) {
  const double r = x.norm();
  if (!(t > 0) || !(r >= R)) throw DomainError("transmitted_wave: need |x| >= R, t > 0");
  const Eigen::Vector3d k = u.mass * x / (u.hbar * t);
  const double kn = k.norm();
  const double omega = u.hbar * kn * kn / (2 * u.mass);
  const Complex C = step_coefficients(kn, lambda, u).C;
  const double decay = std::exp(-lambda * t * (r - R) / (u.hbar * r));
  return free_prefactor(psihat.dim(), t, u) * C * psihat(k) * decay *
         std::polar(1.0, k.dot(x) - omega * t);
}

Complex j_integral(const SpectralAmplitude& psihat, const Eigen::Vector3d& v0, double R,
                   const PhysicalUnits& u, int nodes) {
  const double speed = v0.norm();
  if (!(speed > 0)) throw DomainError("j_integral: v0 must be non-zero");
  const Eigen::Vector3d k0 = u.mass * v0 / u.hbar;
  const double phase = 2 * u.mass * R * speed / u.hbar;
  return gauss_quadrature(
      [&](double rho) {
        const Eigen::Vector3d k = ((2 - rho) / rho) * k0;
        return std::conj(psihat(k)) * std::polar(1.0 / (2 - rho), -phase / rho);
      },
      0.0, 1.0, nodes);
}

double time_delay_leading(const SpectralAmplitude& psihat, const Eigen::Vector3d& v0, double R,
                          double lambda, const PhysicalUnits& u, int nodes) {
  const double speed = v0.norm();
  if (!(speed > 0)) throw DomainError("time_delay_leading: v0 must be non-zero");
  const Complex a = psihat(u.mass * v0 / u.hbar);
  if (std::norm(a) < 1e-12) throw DegenerateError("time_delay_leading: |Psi0(m v0/hbar)|^2 < 1e-12");
  if (lambda == 0.0) return 0.0;
  const Complex J = j_integral(psihat, v0, R, u, nodes);
  const double phase = 2 * u.mass * R * speed / u.hbar;
  const double num = std::imag(a * std::polar(1.0, phase) * J);
  return lambda * R * num / (u.mass * speed * speed * speed * std::norm(a));
}

double abr_reflection(double k, double kappa) {
  if (!(k > 0) || !(kappa > 0)) throw DomainError("abr_reflection: need k, kappa > 0");
  const double r = (k - kappa) / (k + kappa);
  return r * r;
}

} // namespace detlab
