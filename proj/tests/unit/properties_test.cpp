// Seeded random-input loops over identities that must hold everywhere.
#include <doctest.h>

#include <cmath>

#include "detlab/core/fourier.hpp"
#include "detlab/core/random.hpp"
#include "detlab/core/stats.hpp"
#include "detlab/detector_region.hpp"
#include "detlab/dirac.hpp"
#include "detlab/oracles.hpp"
#include "detlab/propagator.hpp"
#include "detlab/zeno.hpp"

using namespace detlab;

namespace {
constexpr int kTrials = 200;
}

TEST_SUITE("properties") {

TEST_CASE("Parseval on random fields") {
  RandomStream rng(100, 0);
  for (int i = 0; i < 40; ++i) {
    const Grid g(1, 1 + 50 * rng.uniform(), Index(8) << (i % 6));
    WaveField f(g);
    for (Index j = 0; j < g.size(); ++j) f.values[j] = {rng.normal(), rng.normal()};
    CHECK(forward_transform(f).norm_squared() == doctest::Approx(f.norm_squared()).epsilon(1e-12));
  }
}

TEST_CASE("free evolution is a group") {
  RandomStream rng(101, 0);
  const Grid g(1, 200, 1024);
  for (int i = 0; i < 20; ++i) {
    const double s = 2 + 2 * rng.uniform(), k0 = rng.normal(), t1 = 5 * rng.uniform(), t2 = 5 * rng.uniform();
    const auto psi = PacketState(GaussianPacket::isotropic(1, s, {0, 0, 0}, {k0, 0, 0})).sample(g);
    const auto a = evolve_free(evolve_free(psi, t1), t2);
    const auto b = evolve_free(psi, t1 + t2);
    CHECK((a.values - b.values).norm() < 1e-11);
  }
}

TEST_CASE("step matching identities") {
  RandomStream rng(102, 0);
  for (int i = 0; i < kTrials; ++i) {
    const double k = 0.05 + 5 * rng.uniform(), l = std::pow(10.0, -4 + 4 * rng.uniform());
    const auto s = step_coefficients(k, l);
    CHECK(matching_residual(s) < 1e-12);
    CHECK(std::abs(s.B) < 1);
  }
}

TEST_CASE("measurement operators are a partition of unity") {
  RandomStream rng(103, 0);
  for (int i = 0; i < kTrials; ++i) {
    const double d = 60 * (rng.uniform() - 0.5), sigma = 0.01 + 3 * rng.uniform();
    const double s = survive_multiplier(d, sigma), q = detect_multiplier(d, sigma);
    CHECK(s * s + q * q == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s >= 0);
    CHECK(q >= 0);
  }
}

TEST_CASE("surface points lie on the boundary") {
  RandomStream rng(104, 0);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d ax(0.5 + rng.uniform(), 0.5 + rng.uniform(), 0.5 + rng.uniform());
    const auto e = DetectorRegion::ellipsoid(1 + 10 * rng.uniform(), ax);
    for (int j = 0; j < 10; ++j) {
      Eigen::Vector3d u(rng.normal(), rng.normal(), rng.normal());
      u.normalize();
      const Eigen::Vector3d x = e.surface_point(u);
      CHECK(e.scaled_radius(x) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(e.normal(x).dot(x) > 0);
      CHECK(e.contains(0.999 * x));
      CHECK_FALSE(e.contains(1.001 * x));
    }
  }
}

TEST_CASE("TV is a metric on distributions") {
  RandomStream rng(105, 0);
  auto draw = [&] {
    std::vector<double> p(6);
    double s = 0;
    for (double& v : p) s += v = rng.uniform();
    for (double& v : p) v /= s;
    return p;
  };
  for (int i = 0; i < kTrials; ++i) {
    const auto p = draw(), q = draw(), r = draw();
    const double pq = total_variation(p, q);
    CHECK(pq >= 0);
    CHECK(pq <= 1);
    CHECK(pq == doctest::Approx(total_variation(q, p)));
    CHECK(pq <= total_variation(p, r) + total_variation(r, q) + 1e-15);
  }
}

TEST_CASE("Dirac projectors at random momenta") {
  RandomStream rng(106, 0);
  for (int i = 0; i < kTrials; ++i) {
    const Eigen::Vector3d k(3 * rng.normal(), 3 * rng.normal(), 3 * rng.normal());
    const auto p = projector(k);
    CHECK((p.plus + p.minus - Matrix4c::Identity()).norm() < 1e-13);
    CHECK((p.minus * p.minus - p.minus).norm() < 1e-12);
    CHECK((p.plus.adjoint() - p.plus).norm() < 1e-13);
  }
}

TEST_CASE("complex momenta split two plus two") {
  RandomStream rng(107, 0);
  for (int i = 0; i < kTrials; ++i) {
    Eigen::Vector3cd k;
    for (int a = 0; a < 3; ++a) k[a] = {2 * rng.normal(), rng.normal()};
    const auto s = complex_k_spectrum(k);
    CHECK(s.dim_plus == 2);
    CHECK(s.dim_minus == 2);
    CHECK(s.eigenvalue_residual < 1e-10);
  }
}

}
