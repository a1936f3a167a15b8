#include <doctest.h>

#include <cmath>
#include <numbers>

#include "detlab/core/quadrature.hpp"
#include "detlab/oracles.hpp"
#include "helpers.hpp"

using namespace detlab;

TEST_SUITE("oracles") {

TEST_CASE("step coefficients solve the matching problem") {
  for (double k : {0.2, 1.0, 3.0})
    for (double l : {1e-3, 0.1, 2.0}) {
      const auto s = step_coefficients(k, l);
      CHECK(std::abs(s.K * s.K - Complex(k * k, 2 * l)) < 1e-12);
      CHECK(s.K.imag() > 0);
      CHECK(std::abs(1.0 + s.B - s.C) < 1e-14);
      CHECK(std::abs(k * (1.0 - s.B) - s.K * s.C) < 1e-13);
      CHECK(matching_residual(s) < 1e-12);
    }
  // Weak absorber: B ≈ −iλ/(2k²) to leading order.
  const auto w = step_coefficients(1.0, 1e-4);
  CHECK(std::abs(w.B - Complex(0, -0.5e-4)) < 1e-8);
}

TEST_CASE("absorbing boundary rule reflection") {
  CHECK(abr_reflection(2.0, 2.0) == 0.0);
  CHECK(abr_reflection(1.0, 3.0) == doctest::Approx(0.25));
}

TEST_CASE("1D cross section is the far-field flux of a Gaussian") {
  const double sigma = 1.5, k0 = 2.0;
  const auto amp = SpectralAmplitude::from_state(PacketState(GaussianPacket::isotropic(1, sigma, {0, 0, 0}, {k0, 0, 0})));
  const auto region = DetectorRegion::sphere(1, 40.0);
  for (double t : {10.0, 20.0, 35.0}) {
    const double k = 40.0 / t;
    CHECK(cross_section(amp, region, {40, 0, 0}, t) ==
          doctest::Approx(40.0 / (t * t) * testing::gaussian_spectral_density(k, sigma, k0)).epsilon(1e-12));
  }
  CHECK(integrate_cross_section(amp, region) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("asymptotic free wave approaches the exact evolution") {
  const double sigma = 1.0, k0 = 1.0;
  const auto amp = SpectralAmplitude::from_state(PacketState(GaussianPacket::isotropic(1, sigma, {0, 0, 0}, {k0, 0, 0})));
  double prev = 1;
  for (double t : {250.0, 500.0, 1000.0}) {
    const Eigen::Vector3d x(k0 * t, 0, 0);
    const auto exact = testing::free_gaussian(x[0], t, sigma, k0);
    const double err = std::abs(asymptotic_free_wave(amp, x, t) - exact) / std::abs(exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("3D cross section integrates to one") {
  const auto amp = SpectralAmplitude::from_state(
      PacketState(GaussianPacket::isotropic(3, 1.2, {0, 0, 0}, {0.5, 0.2, -0.4})));
  CHECK(integrate_cross_section(amp, DetectorRegion::sphere(3, 8.0)) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("binned oracle covers all mass when the last bin is open") {
  const auto st = PacketState(GaussianPacket::isotropic(1, 2.0, {0, 0, 0}, {1.0, 0, 0}));
  const auto axes = HistogramAxes::uniform(DirectionBinning::signs(), 1, 1, 2, 16, 2.0, 50.0, 1.0);
  const auto o = binned_cross_section(SpectralAmplitude::from_state(st), DetectorRegion::sphere(1, 50.0), axes);
  double sum = 0, neg = 0;
  for (int j = 0; j < 16; ++j) neg += o[j];
  for (double v : o) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  // Left-moving mass: ∫_{k<0} |Ψ̂|² = ½ erfc(√2 σ k0).
  CHECK(neg == doctest::Approx(0.5 * std::erfc(std::sqrt(2.0) * 2.0)).epsilon(1e-6));
}

TEST_CASE("tv to oracle counts the undetected remainder") {
  CHECK(tv_to_oracle({0.2, 0.3}, {0.2, 0.3}) == doctest::Approx(0.0));
  CHECK(tv_to_oracle({0.5}, {1.0}) == doctest::Approx(0.5));
  CHECK(tv_to_oracle({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("radial image of an isotropic Gaussian") {
  const auto iso = GaussianPacket::isotropic(3, 1.3);
  const Grid g(1, 40.0, 512);
  const auto u = radial_reduction(iso, g);
  CHECK(u.norm_squared() == doctest::Approx(1.0).epsilon(1e-10));
  for (Index j = 0; j < g.points(); j += 41) {
    const double x = g.coordinate(j);
    const auto expect = std::sqrt(2 * std::numbers::pi) * x * iso.position({std::abs(x), 0, 0});
    CHECK(std::abs(u.values[j] - expect) < 1e-14);
  }
}

TEST_CASE("radial lift of a spherical shell is normalised in 3D") {
  const auto lift = radial_lift(spherical_shell(0.7, 3.0));
  // 4π ∫ k² |Ψ̂(k)|² dk.
  const double n = 4 * std::numbers::pi *
                   composite_gauss([&](double k) { return k * k * std::norm(lift({k, 0, 0})); }, 1e-9, 15.0, 32, 16);
  CHECK(n == doctest::Approx(1.0).epsilon(1e-8));
  // Isotropic.
  CHECK(std::abs(lift({3, 0, 0}) - lift({0, 0.6 * 3, 0.8 * 3})) < 1e-14);
}

TEST_CASE("leading time delay is linear in lambda") {
  const auto amp = SpectralAmplitude::from_state(PacketState(GaussianPacket::isotropic(1, 1.0, {0, 0, 0}, {2, 0, 0})));
  const double a = time_delay_leading(amp, {2, 0, 0}, 20, 0.1);
  const double b = time_delay_leading(amp, {2, 0, 0}, 20, 0.05);
  CHECK(std::isfinite(a));
  CHECK(b == doctest::Approx(a / 2).epsilon(1e-12));
  CHECK(time_delay_leading(amp, {2, 0, 0}, 20, 0.0) == 0.0);
}

}
