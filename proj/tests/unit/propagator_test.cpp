#include <doctest.h>

#include <cmath>
#include <sstream>

#include "detlab/core/errors.hpp"
#include "detlab/packets.hpp"
#include "detlab/propagator.hpp"
#include "helpers.hpp"

using namespace detlab;

namespace {

WaveField sampled_gaussian(const Grid& g, double sigma, double k0) {
  WaveField f(g);
  for (Index j = 0; j < g.points(); ++j) f.values[j] = testing::free_gaussian(g.coordinate(j), 0, sigma, k0);
  return f;
}

double max_error_to_free(const WaveField& f, double t, double sigma, double k0) {
  double err = 0;
  for (Index j = 0; j < f.grid.points(); ++j)
    err = std::max(err, std::abs(f.values[j] - testing::free_gaussian(f.grid.coordinate(j), t, sigma, k0)));
  return err;
}

} // namespace

TEST_SUITE("propagator") {

TEST_CASE("exact free evolution of a Gaussian") {
  const Grid g(1, 200.0, 2048);
  const auto f = evolve_free(sampled_gaussian(g, 2.0, 1.5), 12.0);
  CHECK(max_error_to_free(f, 12.0, 2.0, 1.5) < 1e-12);
}

TEST_CASE("split step with no potential reproduces free evolution") {
  const Grid g(1, 409.6, 1024);
  EvolutionConfig cfg;
  cfg.dt = 0.02;
  const auto r = evolve_potential(sampled_gaussian(g, 2.0, 1.5), ComplexPotential::zero(g), 10.0, cfg);
  CHECK(max_error_to_free(r.final, 10.0, 2.0, 1.5) < 1e-10);
  CHECK(r.times.size() == 500);
}

TEST_CASE("uniform absorber decays as exp(-2 lambda t)") {
  const Grid g(1, 102.4, 256);
  EvolutionConfig cfg;
  cfg.dt = 0.02;
  const double lambda = 0.3, t = 4.0;
  const auto psi = sampled_gaussian(g, 2.0, 0.0);
  const auto r = evolve_potential(psi, ComplexPotential::uniform(g, {0, -lambda}), t, cfg);
  CHECK(r.final.norm_squared() == doctest::Approx(std::exp(-2 * lambda * t)).epsilon(1e-10));
  double absorbed = 0;
  for (double a : r.absorption_record) absorbed += a;
  CHECK(absorbed + r.final.norm_squared() == doctest::Approx(psi.norm_squared()).epsilon(1e-12));
}

TEST_CASE("observer sees every kick") {
  const Grid g(1, 102.4, 256);
  EvolutionConfig cfg;
  cfg.dt = 0.02;
  int calls = 0;
  double last_t = 0;
  evolve_potential(sampled_gaussian(g, 2.0, 0.0), ComplexPotential::zero(g), 0.2, cfg, [&](const StepView& v) {
    ++calls;
    last_t = v.t;
  });
  CHECK(calls == 10);
  CHECK(last_t == doctest::Approx(0.19));
}

TEST_CASE("stability and wraparound guards") {
  const Grid g(1, 20.0, 256);
  EvolutionConfig cfg;
  cfg.dt = 1.0;
  CHECK_THROWS_AS(cfg.validate(g, {}), ConfigurationError);
  cfg.dt = 0.0005;
  CHECK_NOTHROW(cfg.validate(g, {}));
  CHECK_THROWS_AS(evolve_free(sampled_gaussian(g, 1.0, 3.0), 5.0), WraparoundError);

  ComplexPotential gain = ComplexPotential::uniform(g, {0, 0.1});
  CHECK_THROWS(gain.validate(g));
}

TEST_CASE("soft step at dt = 0 is the erfc profile") {
  const PhysicalUnits u;
  for (double x : {-3.0, -0.2, 0.0, 1.1, 4.0}) {
    const auto s = evolved_soft_step(x, 0.8, 1.5, 0.0, u);
    const auto expect = 0.5 * std::erfc(x / 3.0) * std::polar(1.0, 0.8 * x);
    CHECK(std::abs(s - expect) < 1e-14);
  }
  CHECK(soft_step_width(1.5, 2.0, u) == doctest::Approx(std::sqrt(2.25 + 4.0 / (4 * 2.25))));
}

TEST_CASE("packet sampling matches the hand-written Gaussian") {
  const Grid g(1, 60.0, 512);
  const auto f = PacketState(GaussianPacket::isotropic(1, 1.7, {0, 0, 0}, {0.4, 0, 0})).sample(g);
  CHECK(max_error_to_free(f, 0.0, 1.7, 0.4) < 1e-14);
  CHECK(f.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("snapshot round trip") {
  const Grid g(1, 30.0, 64);
  const auto f = sampled_gaussian(g, 1.0, 0.5);
  std::stringstream buf;
  write_snapshot(buf, f, 2.5);
  double t = 0;
  const auto back = read_snapshot(buf, &t);
  CHECK(t == 2.5);
  CHECK(back.grid == g);
  CHECK(back.values == f.values);

  std::stringstream truncated(buf.str().substr(0, 20));
  CHECK_THROWS(read_snapshot(truncated));
}

TEST_CASE("edge mass sees only the boundary band") {
  const Grid g(1, 64.0, 64);
  WaveField f(g);
  f.values[32] = 1.0;
  CHECK(edge_mass(f) == 0.0);
  f.values[0] = 1.0;
  CHECK(edge_mass(f) > 0.0);
}

}
