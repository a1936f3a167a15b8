#include <cmath>
#include <numbers>

#include "detlab/core/errors.hpp"
#include "detlab/core/quadrature.hpp"
#include "detlab/dirac.hpp"

namespace detlab {

namespace {

constexpr double pi = std::numbers::pi;

struct StationaryTerms {
  Spinor plus = Spinor::Zero(), minus = Spinor::Zero();
};

StationaryTerms stationary_terms(const DiracProfile& psihat, const Eigen::Vector3d& x, double t,
                                 const PhysicalUnits& u) {
  if (!(t > 0)) throw DomainError("asymptotic_dirac_wave: t must be positive");
  StationaryTerms out;
  const double r = x.norm();
  const double ct = u.c * t;
  if (r >= ct) return out;
  const double root = std::sqrt(ct * ct - r * r);
  const Eigen::Vector3d k = u.mass * u.c * x / (u.hbar * root);
  const double omega = (u.mass * u.c * u.c / u.hbar) * ct / root;
  const double pref = u.hbar * std::pow(omega, 2.5) / (u.mass * std::pow(u.c, 5));
  const double phase = k.dot(x) - omega * t;
  const auto pk = projector(k, u);
  const auto pmk = projector(-k, u);
  out.plus = pref * std::pow(Complex(0, t), -1.5) * std::polar(1.0, phase) * (pk.plus * psihat(k));
  out.minus = pref * std::pow(Complex(0, -t), -1.5) * std::polar(1.0, -phase) * (pmk.minus * psihat(-k));
  return out;
}

/// ħω/mc² = k⁰/|k| on the shell.
double shell_factor(const Eigen::Vector3d& k, const PhysicalUnits& u) {
  return u.hbar * dirac_omega(k, u) / (u.mass * u.c * u.c);
}

} // namespace

Spinor asymptotic_dirac_wave(const DiracProfile& psihat, const Eigen::Vector3d& x, double t, const PhysicalUnits& u) {
  const auto s = stationary_terms(psihat, x, t, u);
  return s.plus + s.minus;
}

std::vector<double> phase_panel_edges(const QuadratureBox& box, const Eigen::Vector3d& x, double t, int axis,
                                      const PhysicalUnits& u) {
  if (axis < 0 || axis > 2) throw ArgumentError("phase_panel_edges: axis out of range");
  // Local rate: max |∂S/∂k_axis| over a lattice of the transverse coordinates.
  const int samples = 513, m = 9;
  const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
  std::vector<double> pos(samples), phase(samples, 0.0), rate(samples, 0.0);
  for (int s = 0; s < samples; ++s) {
    pos[s] = box.center[axis] + box.half_width * (2.0 * s / (samples - 1) - 1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Eigen::Vector3d k = box.center;
        k[axis] = pos[s];
        k[a1] += box.half_width * (2.0 * i / (m - 1) - 1);
        k[a2] += box.half_width * (2.0 * j / (m - 1) - 1);
        rate[s] = std::max(rate[s], std::abs(x[axis] - u.c * u.c * k[axis] * t / dirac_omega(k, u)));
      }
    if (s > 0) phase[s] = phase[s - 1] + 0.5 * (rate[s] + rate[s - 1]) * (pos[s] - pos[s - 1]);
  }
  // Roughly π nodes per oscillation, with a margin.
  const double per_panel = box.nodes * 2 * pi / (1.3 * pi);
  const int panels = std::max(1, static_cast<int>(std::ceil(phase.back() / per_panel)));
  std::vector<double> edges{pos.front()};
  int s = 0;
  for (int p = 1; p < panels; ++p) {
    const double target = phase.back() * p / panels;
    while (phase[s + 1] < target) ++s;
    const double f = (target - phase[s]) / (phase[s + 1] - phase[s]);
    edges.push_back(pos[s] + f * (pos[s + 1] - pos[s]));
  }
  edges.push_back(pos.back());
  return edges;
}

Spinor dirac_wave_quadrature(const DiracProfile& psihat, const Eigen::Vector3d& x, double t,
                             const QuadratureBox& box, bool positive_only, const PhysicalUnits& u) {
  if (!(box.half_width > 0) || box.nodes < 1) throw ArgumentError("dirac_wave_quadrature: bad box");
  std::array<QuadratureNodes, 3> ax;
  std::array<std::vector<Complex>, 3> plane;
  for (int a = 0; a < 3; ++a) {
    if (box.panels > 0) {
      ax[a] = composite_nodes(box.center[a] - box.half_width, box.center[a] + box.half_width, box.nodes, box.panels);
    } else {
      const auto edges = phase_panel_edges(box, x, t, a, u);
      for (size_t p = 0; p + 1 < edges.size(); ++p) {
        const auto q = composite_nodes(edges[p], edges[p + 1], box.nodes, 1);
        ax[a].x.insert(ax[a].x.end(), q.x.begin(), q.x.end());
        ax[a].w.insert(ax[a].w.end(), q.w.begin(), q.w.end());
      }
    }
    for (double k : ax[a].x) plane[a].push_back(std::polar(1.0, k * x[a]));
  }
  Spinor sum = Spinor::Zero();
  for (size_t i = 0; i < ax[0].x.size(); ++i) {
    Spinor si = Spinor::Zero();
    for (size_t j = 0; j < ax[1].x.size(); ++j) {
      Spinor sj = Spinor::Zero();
      const Complex eij = plane[0][i] * plane[1][j];
      for (size_t l = 0; l < ax[2].x.size(); ++l) {
        const Eigen::Vector3d k(ax[0].x[i], ax[1].x[j], ax[2].x[l]);
        const double omega = dirac_omega(k, u);
        const Spinor hat = psihat(k);
        const Complex e = eij * plane[2][l];
        if (positive_only) {
          sj += ax[2].w[l] * e * std::polar(1.0, -omega * t) * hat;
        } else {
          const Spinor h = apply_symbol(k, hat, u) / (u.hbar * omega);
          sj += ax[2].w[l] * e * (std::polar(1.0, -omega * t) * 0.5 * (hat + h) + std::polar(1.0, omega * t) * 0.5 * (hat - h));
        }
      }
      si += ax[1].w[j] * sj;
    }
    sum += ax[0].w[i] * si;
  }
  return std::pow(2 * pi, -1.5) * sum;
}

CovariantPair to_covariant(const Eigen::Vector3d& k, const Spinor& hat, const PhysicalUnits& u) {
  const auto p = projector(k, u);
  const double f = shell_factor(k, u);
  return {f * (p.plus * hat), f * (p.minus * hat)};
}

Spinor from_covariant(const Eigen::Vector3d& k, const CovariantPair& p, const PhysicalUnits& u) {
  return (p.upper + p.lower) / shell_factor(k, u);
}

double minkowski_norm(const Eigen::Vector4d& x) {
  const double s = x[0] * x[0] - x.tail<3>().squaredNorm();
  return s > 0 ? std::sqrt(s) : 0.0;
}

Eigen::Vector4d shell_point(const Eigen::Vector4d& x, const PhysicalUnits& u) {
  const double n = minkowski_norm(x);
  if (!(n > 0) || !(x[0] > 0)) throw DomainError("shell_point: x must be future-timelike");
  return (u.mass * u.c / u.hbar) * x / n;
}

Spinor asymptotic_covariant_wave(const DiracProfile& psihat, const Eigen::Vector4d& x, const PhysicalUnits& u) {
  const double n = minkowski_norm(x);
  if (!(n > 0) || !(x[0] > 0)) return Spinor::Zero();
  const Eigen::Vector4d k = shell_point(x, u);
  const Eigen::Vector3d ks = k.tail<3>();
  const Spinor up = to_covariant(ks, psihat(ks), u).upper;      // Ψ̃(k)
  const Spinor down = to_covariant(-ks, psihat(-ks), u).lower;  // Ψ̃(−k)
  const double kx = u.mass * u.c * n / u.hbar;                   // k_μ x^μ
  const double pref = std::pow(u.mass * u.c / (u.hbar * n), 1.5);
  return pref * (std::polar(1.0, -0.75 * pi - kx) * up + std::polar(1.0, 0.75 * pi + kx) * down);
}

double sigma_av(const DiracProfile& psihat, const Eigen::Vector4d& x, const Eigen::Vector4d& n_lower,
                const PhysicalUnits& u) {
  const double n = minkowski_norm(x);
  if (!(n > 0) || !(x[0] > 0)) return 0.0;
  if (!(n_lower.dot(x) > 0)) throw StarShapeError("sigma_av: n_mu x^mu <= 0");
  const auto& s = spinor_algebra();
  Matrix4c slash = Matrix4c::Zero();
  for (int mu = 0; mu < 4; ++mu) slash += n_lower[mu] * s.gamma[mu];
  const Matrix4c form = s.gamma[0] * slash;
  const Eigen::Vector3d ks = shell_point(x, u).tail<3>();
  const Spinor up = to_covariant(ks, psihat(ks), u).upper;
  const Spinor down = to_covariant(-ks, psihat(-ks), u).lower;
  const double sum = std::real(up.dot(form * up)) + std::real(down.dot(form * down));
  return std::pow(u.mass, 3) * std::pow(u.c, 4) / (std::pow(u.hbar, 3) * n * n * n) * sum;
}

double sigma_positive(const DiracProfile& psihat, const Eigen::Vector4d& x, const Eigen::Vector4d& n_lower,
                      const PhysicalUnits& u) {
  const double n = minkowski_norm(x);
  if (!(n > 0) || !(x[0] > 0)) return 0.0;
  const double nx = n_lower.dot(x);
  if (!(nx > 0)) throw StarShapeError("sigma_positive: n_mu x^mu <= 0");
  const Eigen::Vector3d k = u.mass * u.c * x.tail<3>() / (u.hbar * n);
  return std::pow(u.c, 4) * std::pow(u.mass, 3) * x[0] * nx / (std::pow(u.hbar, 3) * std::pow(n, 5)) *
         psihat(k).squaredNorm();
}

double averaged_density(const DiracProfile& psihat, const Eigen::Vector3d& x, double t, double window, int samples,
                        const PhysicalUnits& u) {
  if (!(window > 0) || samples < 1) throw ArgumentError("averaged_density: bad window");
  double s = 0;
  for (int i = 0; i < samples; ++i)
    s += asymptotic_dirac_wave(psihat, x, t + (i + 0.5) * window / samples, u).squaredNorm();
  return s / samples;
}

double incoherent_density(const DiracProfile& psihat, const Eigen::Vector3d& x, double t, const PhysicalUnits& u) {
  const auto s = stationary_terms(psihat, x, t, u);
  return s.plus.squaredNorm() + s.minus.squaredNorm();
}

} // namespace detlab
