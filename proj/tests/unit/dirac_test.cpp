#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "detlab/core/random.hpp"
#include "detlab/dirac.hpp"

using namespace detlab;

namespace {

Eigen::Vector3d random_k(RandomStream& rng, double scale = 2.0) {
  return scale * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
}

Spinor random_spinor(RandomStream& rng) {
  Spinor s;
  for (int a = 0; a < 4; ++a) s[a] = {rng.normal(), rng.normal()};
  return s.normalized();
}

} // namespace

TEST_SUITE("dirac") {

TEST_CASE("Clifford relations") {
  CHECK(algebra_residual() < 1e-15);
  const auto& A = spinor_algebra();
  CHECK((A.gamma[0] - A.beta).norm() == 0.0);
  CHECK((A.beta * A.beta - Matrix4c::Identity()).norm() < 1e-15);
}

TEST_CASE("symbol, projectors and energy spinors") {
  RandomStream rng(21, 0);
  for (int i = 0; i < 20; ++i) {
    const auto k = random_k(rng);
    const auto M = dirac_symbol(k);
    CHECK((M * M - dirac_omega(k) * dirac_omega(k) * Matrix4c::Identity()).norm() < 1e-12);
    const auto v = random_spinor(rng);
    CHECK((apply_symbol(k, v) - M * v).norm() < 1e-13);
    const auto p = projector(k);
    CHECK((p.plus * p.plus - p.plus).norm() < 1e-13);
    CHECK((p.plus * p.minus).norm() < 1e-13);
    const auto e = energy_spinor(k, +1, v);
    CHECK((M * e - p.omega * e).norm() < 1e-12);
    CHECK(e.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("complex k keeps a two-plus-two split") {
  // Regression: the spectrum must use k·k, not the Hermitian k†k.
  const Eigen::Vector3cd k(Complex(0.3, 0.4), Complex(-1.0, 0.2), Complex(0.5, -0.7));
  const auto s = complex_k_spectrum(k);
  CHECK(s.dim_plus == 2);
  CHECK(s.dim_minus == 2);
  CHECK(s.eigenvalue_residual < 1e-12);
  const Complex kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  CHECK(std::abs(s.root * s.root - (kk + 1.0)) < 1e-12);
}

TEST_CASE("spectral Dirac evolution is unitary") {
  const Grid g(3, 12.0, 8);
  DiracField psi(g);
  RandomStream rng(4, 4);
  for (Index i = 0; i < g.size(); ++i) psi.set(i, random_spinor(rng));
  const auto s = dirac_forward(psi);
  CHECK(s.norm_squared(true) == doctest::Approx(psi.norm_squared(false)).epsilon(1e-12));
  const auto once = evolve_dirac_spectral(s, 0.7);
  CHECK(once.norm_squared(true) == doctest::Approx(s.norm_squared(true)).epsilon(1e-12));
  const auto twice = evolve_dirac_spectral(evolve_dirac_spectral(s, 0.3), 0.4);
  double err = 0;
  for (Index i = 0; i < g.size(); ++i) err = std::max(err, (twice.at(i) - once.at(i)).norm());
  CHECK(err < 1e-12);
  const auto back = dirac_inverse(s);
  err = 0;
  for (Index i = 0; i < g.size(); ++i) err = std::max(err, (back.at(i) - psi.at(i)).norm());
  CHECK(err < 1e-12);
}

TEST_CASE("covariant round trip") {
  RandomStream rng(8, 1);
  for (int i = 0; i < 10; ++i) {
    const auto k = random_k(rng, 1.0);
    const auto hat = random_spinor(rng);
    CHECK((from_covariant(k, to_covariant(k, hat)) - hat).norm() < 1e-12);
  }
  const Eigen::Vector4d x(5, 1, 2, 3);
  CHECK(minkowski_norm(x) == doctest::Approx(std::sqrt(25.0 - 14.0)));
  const auto kp = shell_point(x);
  CHECK(kp[0] * kp[0] - kp.tail<3>().squaredNorm() == doctest::Approx(1.0));
}

TEST_CASE("surface densities agree for a positive-energy state") {
  const Spinor chi(1, 0, 0, 0);
  const auto profile = gaussian_energy_profile({0, 0, 0.5}, 0.3, +1, chi);
  for (const Eigen::Vector4d x : {Eigen::Vector4d(40, 3, 4, 12), Eigen::Vector4d(60, -5, 2, 20)}) {
    Eigen::Vector4d n = Eigen::Vector4d::Zero();
    n.tail<3>() = x.tail<3>().normalized();
    const double pos = sigma_positive(profile, x, n);
    CHECK(pos > 0);
    CHECK(sigma_av(profile, x, n) == doctest::Approx(pos).epsilon(1e-6));
    CHECK(sigma_classical(profile, x, n) == doctest::Approx(pos).epsilon(1e-12));
  }
}

TEST_CASE("helix velocity is the derivative of the helix") {
  RandomStream rng(2, 2);
  Spinor up = Spinor::Zero(), um = Spinor::Zero();
  up.head<2>() = Eigen::Vector2cd(Complex(0.6, 0.1), Complex(-0.2, 0.4));
  um.tail<2>() = Eigen::Vector2cd(Complex(0.3, -0.5), Complex(0.1, 0.2));
  const auto h = helix_params(up, um, Eigen::Vector3d::Zero());
  const double dt = 1e-5;
  for (double t : {0.1, 1.3, 2.9}) {
    const Eigen::Vector3d fd = (helix_position(h, t + dt) - helix_position(h, t - dt)) / (2 * dt);
    CHECK((fd - helix_velocity(h, t)).norm() < 1e-7);
  }
  CHECK(h.omega0 == doctest::Approx(2.0));

  // The fit finds the period from an offset guess.
  std::vector<double> t;
  std::vector<Eigen::Vector3d> x;
  for (int i = 0; i < 1000; ++i) {
    t.push_back(0.0157 * i);
    x.push_back(helix_position(h, t.back()));
  }
  for (double g : {0.97, 1.03}) {
    const auto f = helix_fit(t, x, g * h.omega0);
    CHECK(f.period == doctest::Approx(std::numbers::pi).epsilon(1e-10));
    CHECK(f.rms_residual < 1e-12);
  }
}

TEST_CASE("step K3 against its small-lambda expansion") {
  const Eigen::Vector3d k(0.3, 0.2, 0.8);
  const Spinor chi(1, 0, 0, 0);
  double prev = 1;
  for (double l : {0.04, 0.02, 0.01}) {
    const auto s = dirac_step_reflection(k, l, {1, 0}, +1, chi);
    const double err = std::abs(s.K3 - k3_expansion(k, l, 1));
    CHECK(err < prev / 3);
    prev = err;
    CHECK(s.reflection < 1);
  }
}

TEST_CASE("surfaces for the no-signalling check") {
  const auto sph = sphere_surface(10);
  CHECK(sph.hit_time({0.5, 0, 0}, 1.0) == doctest::Approx(20.0));
  const auto cap = capped_sphere_surface(10, 15, 1.0);
  CHECK(cap.hit_time({0.5, 0, 0}, 1.0) == doctest::Approx(15.0));
  CHECK(cap.hit_time({0.9, 0, 0}, 1.0) == doctest::Approx(10 / 0.9));

  const auto r = no_signaling_check({0, 0, 0.5}, 0.3, sph, cap, 12.0, 20000, 5);
  CHECK(r.paired_difference == 0.0);
  CHECK(std::abs(r.z_score) < 4);
}

}
