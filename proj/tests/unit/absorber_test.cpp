#include <doctest.h>

#include <cmath>
#include <numbers>

#include "detlab/absorber.hpp"
#include "detlab/core/errors.hpp"
#include "detlab/core/random.hpp"
#include "detlab/detector_region.hpp"
#include "detlab/flux.hpp"
#include "detlab/histogram.hpp"
#include "detlab/oracles.hpp"

using namespace detlab;

TEST_SUITE("absorber") {

TEST_CASE("region geometry") {
  const auto s = DetectorRegion::sphere(3, 5.0);
  CHECK(s.contains({1, 2, 3}));
  CHECK_FALSE(s.contains({3, 3, 3}));

  const Eigen::Vector3d ax(1.0, 2.0, 0.5);
  const auto e = DetectorRegion::ellipsoid(3.0, ax);
  RandomStream rng(3, 0);
  for (int i = 0; i < 20; ++i) {
    Eigen::Vector3d u(rng.normal(), rng.normal(), rng.normal());
    u.normalize();
    // s(u) = 1/√Σ(uᵢ/aᵢ)² for an ellipsoid.
    const double s_exact = 1 / std::sqrt((u.array() / ax.array()).square().sum());
    CHECK(e.shape(u) == doctest::Approx(s_exact).epsilon(1e-13));
    const Eigen::Vector3d x = e.surface_point(u);
    CHECK(e.scaled_radius(x) == doctest::Approx(1.0).epsilon(1e-13));
    const Eigen::Vector3d grad = (x.array() / (9.0 * ax.array().square())).matrix().normalized();
    CHECK((e.normal(x) - grad).norm() < 1e-9);
  }
  CHECK_NOTHROW(e.check_star_shaped());

  const auto t = DetectorRegion::tabulated(2.0, 5, 8, std::vector<double>(40, 1.0));
  CHECK(t.shape(Eigen::Vector3d(0.6, 0, 0.8)) == doctest::Approx(1.0));
}

TEST_CASE("potentials and outside mass") {
  const Grid g(1, 20.0, 64);
  const auto v = half_line_potential(g, 0.0, 0.3);
  for (Index j = 0; j < g.points(); ++j) CHECK(v.values[j] == Complex(0, g.coordinate(j) >= 0 ? -0.3 : 0));
  const auto a = absorbing_potential(g, DetectorRegion::sphere(1, 5.0), 0.2);
  CHECK(a.values[32] == Complex(0, 0));
  CHECK(a.values[0] == Complex(0, -0.2));

  WaveField f(g);
  f.values.setConstant(1.0 / std::sqrt(20.0));
  CHECK(mass_outside(f, DetectorRegion::sphere(1, 5.0)) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("histogram binning and marginals") {
  const auto axes = HistogramAxes::uniform(DirectionBinning::signs(), 2, 1.0, 2.0, 4, 2.0, 10.0, 1.0);
  DetectionHistogram h(axes);
  h.add(1, 1.2, 0.1, 0.25);
  h.add(0, 1.7, 1.9, 0.5);
  h.add(1, 1.2, 7.0, 0.25);  // last τ bin is open
  CHECK(h.total() == doctest::Approx(1.0));
  const auto tau = h.tau_marginal();
  CHECK(tau.front() == doctest::Approx(0.25));
  CHECK(tau.back() == doctest::Approx(0.75));
  CHECK(h.u_marginal()[0] == doctest::Approx(0.5));
  CHECK(axes.tau_of_time(5.0) == doctest::Approx(0.5));

  const auto eq = DirectionBinning::equal_area(4, 6);
  CHECK(eq.count() == 24);
  for (int b = 0; b < eq.count(); ++b) CHECK(eq.bin_of(eq.center(b)) == b);
}

TEST_CASE("ladder validation") {
  CHECK_NOTHROW(validate_ladder({{10, 1.0}, {20, 0.6}}));
  CHECK_THROWS_AS(validate_ladder({}), ConfigurationError);
  CHECK_THROWS_AS(validate_ladder({{10, 1.0}, {10, 0.6}}), ConfigurationError);
  CHECK_THROWS_AS(validate_ladder({{10, 1.0}, {20, 1.0}}), ConfigurationError);
  CHECK_THROWS_AS(validate_ladder({{10, 1.0}, {20, 0.4}}), ConfigurationError);
}

TEST_CASE("absorption conserves probability between histogram and survivor") {
  const Grid g(1, 409.6, 1024);
  const auto psi = PacketState(GaussianPacket::isotropic(1, 2.0, {0, 0, 0}, {2, 0, 0})).sample(g);
  const auto region = DetectorRegion::sphere(1, 30.0);
  const auto axes = HistogramAxes::uniform(DirectionBinning::signs(), 1, 1, 2, 10, 2.0, 30.0, 2.0);
  EvolutionConfig cfg;
  cfg.dt = 0.02;
  const auto r = run_absorption(psi, region, 0.5, axes, 60.0, cfg);
  CHECK(r.histogram.total() + r.final_norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.histogram.u_marginal()[1] > 0.99 * r.histogram.total());
  CHECK(r.residence_time == doctest::Approx(1.0).epsilon(0.15));

  CHECK_THROWS_AS(run_absorption(psi, DetectorRegion::sphere(1, 2.0), 0.5, axes, 60.0, cfg), ConfigurationError);
}

TEST_CASE("free flux matches the far-field cross section") {
  const Grid g(1, 819.2, 4096);
  const PacketState st(GaussianPacket::isotropic(1, 2.0, {0, 0, 0}, {1.5, 0, 0}));
  const auto region = DetectorRegion::sphere(1, 60.0);
  const auto axes = HistogramAxes::uniform(DirectionBinning::signs(), 1, 1, 2, 12, 2.4, 60.0, 1.5);
  const auto flux = free_flux_distribution(st.sample(g), region, axes, 150.0, 0.1);
  const auto oracle = binned_cross_section(SpectralAmplitude::from_state(st), region, axes);
  CHECK(tv_to_oracle(flux.histogram().u_tau(), oracle) < 0.05);
  CHECK(flux.inward < 1e-3);
}

}
