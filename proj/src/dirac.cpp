#include "detlab/dirac.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "detlab/core/errors.hpp"
#include "detlab/core/fourier.hpp"

namespace detlab {

namespace {

SpinorAlgebra build_algebra() {
  const Complex i(0, 1);
  SpinorAlgebra s;
  s.sigma[0] << 0, 1, 1, 0;
  s.sigma[1] << 0, -i, i, 0;
  s.sigma[2] << 1, 0, 0, -1;
  s.beta.setZero();
  s.beta.topLeftCorner<2, 2>().setIdentity();
  s.beta.bottomRightCorner<2, 2>() = -Eigen::Matrix2cd::Identity();
  for (int a = 0; a < 3; ++a) {
    s.alpha[a].setZero();
    s.alpha[a].topRightCorner<2, 2>() = s.sigma[a];
    s.alpha[a].bottomLeftCorner<2, 2>() = s.sigma[a];
    s.gamma[a + 1] = s.beta * s.alpha[a];
  }
  s.gamma[0] = s.beta;
  return s;
}

} // namespace

const SpinorAlgebra& spinor_algebra() {
  static const SpinorAlgebra s = build_algebra();
  return s;
}

double algebra_residual() {
  const auto& s = spinor_algebra();
  const Matrix4c I = Matrix4c::Identity();
  double r = (s.beta * s.beta - I).cwiseAbs().maxCoeff();
  for (int a = 0; a < 3; ++a) {
    r = std::max(r, (s.alpha[a] * s.beta + s.beta * s.alpha[a]).cwiseAbs().maxCoeff());
    for (int b = 0; b < 3; ++b) {
      const Matrix4c ac = s.alpha[a] * s.alpha[b] + s.alpha[b] * s.alpha[a];
      r = std::max(r, (ac - (a == b ? 2.0 : 0.0) * I).cwiseAbs().maxCoeff());
    }
  }
  return r;
}

Matrix4c dirac_symbol(const Eigen::Vector3cd& k, const PhysicalUnits& u) {
  const auto& s = spinor_algebra();
  Matrix4c m = u.mass * u.c * u.c * s.beta;
  for (int a = 0; a < 3; ++a) m += u.c * u.hbar * k[a] * s.alpha[a];
  return m;
}

Matrix4c dirac_symbol(const Eigen::Vector3d& k, const PhysicalUnits& u) {
  return dirac_symbol(Eigen::Vector3cd(k.cast<Complex>()), u);
}

double dirac_omega(const Eigen::Vector3d& k, const PhysicalUnits& u) {
  const double mc2 = u.mass * u.c * u.c / u.hbar;
  return std::sqrt(u.c * u.c * k.squaredNorm() + mc2 * mc2);
}

Projectors projector(const Eigen::Vector3d& k, const PhysicalUnits& u) {
  Projectors p;
  p.omega = dirac_omega(k, u);
  const Matrix4c m = dirac_symbol(k, u) / (u.hbar * p.omega);
  p.plus = 0.5 * (Matrix4c::Identity() + m);
  p.minus = 0.5 * (Matrix4c::Identity() - m);
  return p;
}

Spinor apply_symbol(const Eigen::Vector3d& k, const Spinor& v, const PhysicalUnits& u) {
  // Block form: [mc², ħc σ·k; ħc σ·k, −mc²].
  const double mc2 = u.mass * u.c * u.c, hc = u.hbar * u.c;
  const Complex kp(k[0], k[1]), km(k[0], -k[1]);
  const Complex s0 = hc * (k[2] * v[2] + km * v[3]), s1 = hc * (kp * v[2] - k[2] * v[3]);
  const Complex t0 = hc * (k[2] * v[0] + km * v[1]), t1 = hc * (kp * v[0] - k[2] * v[1]);
  Spinor out;
  out << mc2 * v[0] + s0, mc2 * v[1] + s1, t0 - mc2 * v[2], t1 - mc2 * v[3];
  return out;
}

Spinor energy_spinor(const Eigen::Vector3d& k, int sign, const Spinor& chi, const PhysicalUnits& u) {
  const double s = sign > 0 ? 1.0 : -1.0;
  Spinor v = 0.5 * (chi + s * apply_symbol(k, chi, u) / (u.hbar * dirac_omega(k, u)));
  const double n = v.norm();
  if (n < 1e-8) throw DegenerateError("energy_spinor: reference spinor is annihilated by the projector");
  return v / n;
}

DiracField::DiracField(const Grid& g, const PhysicalUnits& u) : grid(g), units(u) {
  for (auto& c : comp) c = Eigen::VectorXcd::Zero(g.size());
}

double DiracField::norm_squared(bool spectral) const {
  double s = 0;
  for (const auto& c : comp) s += c.squaredNorm();
  return s * (spectral ? grid.k_cell_volume() : grid.cell_volume());
}

DiracField dirac_forward(const DiracField& psi) {
  DiracField out(psi.grid, psi.units);
  for (int a = 0; a < 4; ++a) {
    WaveField f(psi.grid, psi.units);
    f.values = psi.comp[a];
    out.comp[a] = forward_transform(f).values;
  }
  return out;
}

DiracField dirac_inverse(const DiracField& spectral) {
  DiracField out(spectral.grid, spectral.units);
  for (int a = 0; a < 4; ++a) {
    const SpectralField g{spectral.grid, spectral.comp[a], spectral.units};
    out.comp[a] = inverse_transform(g).values;
  }
  return out;
}

DiracField evolve_dirac_spectral(const DiracField& spectral, double t) {
  if (!(t >= 0)) throw DomainError("evolve_dirac_spectral: t must be non-negative");
  DiracField out = spectral;
  if (t == 0) return out;
  for (Index i = 0; i < spectral.grid.size(); ++i) {
    const auto p = projector(spectral.grid.wavevector(i), spectral.units);
    const Complex ph = std::polar(1.0, -p.omega * t);
    out.set(i, (ph * p.plus + std::conj(ph) * p.minus) * spectral.at(i));
  }
  return out;
}

DiracProfile gaussian_energy_profile(const Eigen::Vector3d& k0, double sigma_k, int sign, const Spinor& chi,
                                     const PhysicalUnits& u) {
  if (!(sigma_k > 0)) throw ArgumentError("gaussian_energy_profile: sigma_k must be positive");
  const double norm = std::pow(2 * std::numbers::pi * sigma_k * sigma_k, -0.75);
  return [=](const Eigen::Vector3d& k) -> Spinor {
    const double g = norm * std::exp(-(k - k0).squaredNorm() / (4 * sigma_k * sigma_k));
    return g * energy_spinor(k, sign, chi, u);
  };
}

ComplexSpectrum complex_k_spectrum(const Eigen::Vector3cd& k, const PhysicalUnits& u) {
  const Matrix4c m = dirac_symbol(k, u);
  const Complex eta = u.hbar * u.hbar * u.c * u.c * (k.transpose() * k).value() + std::pow(u.mass * u.c * u.c, 2);
  const double scale = std::pow(u.mass * u.c * u.c, 2) + u.hbar * u.hbar * u.c * u.c * k.squaredNorm();
  if (std::abs(eta) < 1e-12 * scale) throw DegenerateError("complex_k_spectrum: eta = 0");
  ComplexSpectrum out;
  out.root = std::sqrt(eta);
  Eigen::ComplexEigenSolver<Matrix4c> es(m, false);
  out.eigenvalues = es.eigenvalues();
  for (int j = 0; j < 4; ++j) {
    const Complex e = out.eigenvalues[j];
    out.eigenvalue_residual =
        std::max(out.eigenvalue_residual, std::min(std::abs(e - out.root), std::abs(e + out.root)) / std::sqrt(scale));
  }
  // The lemma's projectors (M ± s₀)/2s₀; their ranges are the eigenspaces.
  const Matrix4c qp = (m + out.root * Matrix4c::Identity()) / (2.0 * out.root);
  const Matrix4c qm = (out.root * Matrix4c::Identity() - m) / (2.0 * out.root);
  Eigen::FullPivLU<Matrix4c> lp(m - out.root * Matrix4c::Identity()), lm(m + out.root * Matrix4c::Identity());
  lp.setThreshold(1e-10);
  lm.setThreshold(1e-10);
  out.dim_plus = static_cast<int>(lp.dimensionOfKernel());
  out.dim_minus = static_cast<int>(lm.dimensionOfKernel());
  Eigen::MatrixXcd vp = Eigen::HouseholderQR<Eigen::MatrixXcd>(Eigen::MatrixXcd(qp.fullPivLu().image(qp)))
                            .householderQ() * Eigen::MatrixXcd::Identity(4, 2);
  Eigen::MatrixXcd vm = Eigen::HouseholderQR<Eigen::MatrixXcd>(Eigen::MatrixXcd(qm.fullPivLu().image(qm)))
                            .householderQ() * Eigen::MatrixXcd::Identity(4, 2);
  out.max_overlap = Eigen::JacobiSVD<Eigen::MatrixXcd>(vp.adjoint() * vm).singularValues()[0];
  out.orthogonal = out.max_overlap < 1e-10;
  return out;
}

Complex k3_expansion(const Eigen::Vector3d& k, double lambda, double a0, const PhysicalUnits& u) {
  if (!(k[2] > 0)) throw DomainError("k3_expansion: need k3 > 0");
  const double root = std::sqrt(u.hbar * u.hbar * k.squaredNorm() + std::pow(u.mass * u.c, 2));
  return Complex(k[2], lambda * a0 * root / (u.hbar * u.hbar * u.c * k[2]));
}

namespace {

/// Orthonormal basis (4×2) of the range of a rank-2 matrix.
Eigen::Matrix<Complex, 4, 2> range_basis(const Matrix4c& p) {
  Eigen::ColPivHouseholderQR<Matrix4c> qr(p);
  const Matrix4c q = qr.householderQ();
  return q.leftCols<2>();
}

} // namespace

DiracStep dirac_step_reflection(const Eigen::Vector3d& k, double lambda, const Eigen::Vector2d& a_mu, int sign,
                                const Spinor& chi, const PhysicalUnits& u) {
  if (!(k[2] > 0)) throw DomainError("dirac_step_reflection: need k3 > 0");
  if (!(lambda >= 0)) throw DomainError("dirac_step_reflection: lambda must be >= 0");
  const double a0 = a_mu[0], a3 = a_mu[1];
  if (!(a0 > std::abs(a3))) throw DomainError("dirac_step_reflection: A must be future-timelike");
  const double omega = dirac_omega(k, u);
  if (lambda * a0 > 0.1 * u.hbar * omega) throw DomainError("dirac_step_reflection: lambda too large");

  DiracStep out;
  out.A = energy_spinor(k, sign, chi, u);
  const Complex s0 = sign * u.hbar * omega + Complex(0, lambda * a0);
  const Complex q = (s0 * s0 - std::pow(u.mass * u.c * u.c, 2)) / std::pow(u.hbar * u.c, 2) - k[0] * k[0] -
                    k[1] * k[1];
  Complex K3 = std::sqrt(q);
  if (std::abs(K3 - k[2]) > std::abs(-K3 - k[2])) K3 = -K3;  // continuation of k³
  out.K3 = K3;
  out.decay_rate = K3.imag() - lambda * a3 / (u.hbar * u.c);

  const Eigen::Vector3cd K(k[0], k[1], K3);
  const Matrix4c qc = (dirac_symbol(K, u) + s0 * Matrix4c::Identity()) / (2.0 * s0);
  const auto p_ref = projector(Eigen::Vector3d(k[0], k[1], -k[2]), u);
  const auto ub = range_basis(sign > 0 ? p_ref.plus : p_ref.minus);
  const auto uc = range_basis(qc);

  Matrix4c sys;
  sys.leftCols<2>() = uc;
  sys.rightCols<2>() = -ub;
  Eigen::FullPivLU<Matrix4c> lu(sys);
  if (!lu.isInvertible() || lu.rcond() < 1e-12)
    throw BranchError("dirac_step_reflection: singular matching system (rcond " + std::to_string(lu.rcond()) + ")");
  const Spinor coef = lu.solve(out.A);
  out.C = uc * coef.head<2>();
  out.B = ub * coef.tail<2>();
  out.reflection = out.B.norm() / out.A.norm();
  const Spinor lhs = Complex(0, k[2]) * (out.A - out.B);
  const Spinor rhs = (Complex(0, 1) * K3 + lambda * a3 / (u.hbar * u.c)) * out.C;
  out.derivative_residual = (lhs - rhs).norm() / (k[2] * out.A.norm());
  return out;
}

HelixParams helix_params(const Spinor& up, const Spinor& um, const Eigen::Vector3d& x0, const PhysicalUnits& u) {
  if (up.tail<2>().norm() > 1e-12 * up.norm() || um.head<2>().norm() > 1e-12 * um.norm())
    throw ArgumentError("helix_params: spinors must lie in the rest-frame energy subspaces");
  const double n = up.squaredNorm() + um.squaredNorm();
  if (!(n > 0)) throw ArgumentError("helix_params: zero spinors");
  const auto& s = spinor_algebra();
  HelixParams h;
  h.u_plus = up;
  h.u_minus = um;
  h.center = x0;
  h.omega0 = 2 * u.mass * u.c * u.c / u.hbar;
  for (int a = 0; a < 3; ++a) {
    const Complex z = up.dot(s.alpha[a] * um);  // u₊† α u₋
    h.a[a] = 2 * u.c * z.real() / n;
    h.b[a] = -2 * u.c * z.imag() / n;
  }
  return h;
}

Eigen::Vector3d helix_position(const HelixParams& h, double t) {
  return h.center - h.b / h.omega0 * std::cos(h.omega0 * t) + h.a / h.omega0 * std::sin(h.omega0 * t);
}

Eigen::Vector3d helix_velocity(const HelixParams& h, double t, const PhysicalUnits& u) {
  const auto& s = spinor_algebra();
  const Spinor psi = h.u_plus * std::polar(1.0, -0.5 * h.omega0 * t) + h.u_minus * std::polar(1.0, 0.5 * h.omega0 * t);
  const double rho = psi.squaredNorm();
  Eigen::Vector3d v;
  for (int a = 0; a < 3; ++a) v[a] = u.c * std::real(psi.dot(s.alpha[a] * psi)) / rho;
  return v;
}

namespace {

struct LinearFit {
  Eigen::Matrix<double, 4, 3> coef;  // rows: const, t, cos, sin
  double rss = 0.0;
};

LinearFit fit_at(const std::vector<double>& t, const std::vector<Eigen::Vector3d>& x, double w) {
  const Index n = static_cast<Index>(t.size());
  Eigen::MatrixXd a(n, 4), y(n, 3);
  for (Index i = 0; i < n; ++i) {
    a.row(i) << 1.0, t[i], std::cos(w * t[i]), std::sin(w * t[i]);
    y.row(i) = x[i].transpose();
  }
  LinearFit f;
  f.coef = a.colPivHouseholderQr().solve(y);
  f.rss = (a * f.coef - y).squaredNorm();
  return f;
}

} // namespace

HelixFit helix_fit(const std::vector<double>& t, const std::vector<Eigen::Vector3d>& x, double omega_guess) {
  if (t.size() != x.size() || t.size() < 8) throw ArgumentError("helix_fit: need >= 8 samples");
  if (!(omega_guess > 0)) throw ArgumentError("helix_fit: omega_guess must be positive");
  // Coarse scan then golden-section refinement of the residual in ω.
  double best = omega_guess, best_rss = fit_at(t, x, omega_guess).rss;
  for (int i = -200; i <= 200; ++i) {
    const double w = omega_guess * (1 + 0.002 * i);
    const double r = fit_at(t, x, w).rss;
    if (r < best_rss) {
      best_rss = r;
      best = w;
    }
  }
  double lo = best * (1 - 0.002), hi = best * (1 + 0.002);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = fit_at(t, x, c).rss, fd = fit_at(t, x, d).rss;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * best; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = fit_at(t, x, c).rss;
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = fit_at(t, x, d).rss;
    }
  }
  const double w = 0.5 * (lo + hi);
  const LinearFit f = fit_at(t, x, w);
  HelixFit out;
  out.period = 2 * std::numbers::pi / w;
  out.center = f.coef.row(0).transpose();
  out.drift = f.coef.row(1).transpose();
  Eigen::Matrix<double, 3, 2> pq;
  pq.col(0) = f.coef.row(2).transpose();
  pq.col(1) = f.coef.row(3).transpose();
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>>(pq).singularValues();
  out.semi_major = sv[0];
  out.semi_minor = sv[1];
  out.rms_residual = std::sqrt(f.rss / t.size());
  return out;
}

} // namespace detlab
