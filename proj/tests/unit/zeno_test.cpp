#include <doctest.h>

#include <cmath>

#include "detlab/core/errors.hpp"
#include "detlab/oracles.hpp"
#include "detlab/zeno.hpp"

using namespace detlab;

TEST_SUITE("zeno") {

TEST_CASE("survive and detect multipliers") {
  for (double d : {-40.0, -3.0, -0.1, 0.0, 0.7, 5.0, 40.0}) {
    const double s = survive_multiplier(d, 1.2);
    CHECK(s == doctest::Approx(0.5 * std::erfc(d / 2.4)).epsilon(1e-14));
    // 1 − s² = (1 − s)(1 + s), with 1 − s = ½ erfc(−d/2σ) computed on its own.
    const double expect = std::sqrt(0.5 * std::erfc(-d / 2.4) * (1 + s));
    CHECK(detect_multiplier(d, 1.2) == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(detect_multiplier(-40.0, 1.2) > 0.0);
}

TEST_CASE("survival oracle for a 1D Gaussian") {
  const double sigma = 2.0, k0 = 1.0, R = 100.0, period = 10.0;
  const auto amp = SpectralAmplitude::from_state(PacketState(GaussianPacket::isotropic(1, sigma, {0, 0, 0}, {k0, 0, 0})));
  for (int n : {1, 5, 10, 20}) {
    // Survives iff |k| ≤ R/(nT); |Ψ̂|² is Gaussian of variance 1/4σ².
    const double K = R / (n * period);
    const double a = std::sqrt(2.0) * sigma;
    const double exact = 0.5 * (std::erf(a * (K - k0)) + std::erf(a * (K + k0)));
    CHECK(zeno_survival_oracle(amp, DetectorRegion::sphere(1, R), n, period) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("config checks and the admissible window") {
  ZenoConfig z;
  z.period = 400;
  z.sigma1 = 0.8;
  CHECK_NOTHROW(z.validate());
  CHECK(z.admissible(4000, 1.0, {}));
  z.sigma1 = 0.2;
  CHECK_FALSE(z.admissible(4000, 1.0, {}));
  z.sigma1 = 20;
  CHECK_FALSE(z.admissible(4000, 1.0, {}));
  z.period = -1;
  CHECK_THROWS_AS(z.validate(), ConfigurationError);

  ZenoConfig w;
  w.period = 2.0;
  w.sigma1 = 0.5;
  const auto a = step_width_audit(w, DetectorRegion::sphere(1, 50.0), 4);
  const double sn = 2.0;
  CHECK(a.width == doctest::Approx(std::sqrt(sn * sn + 4.0 / (4 * sn * sn))));
  CHECK(a.bound_ratio == doctest::Approx(a.width / (50.0 / 4)));
}

TEST_CASE("POV effect splits the norm") {
  const Grid g(1, 200.0, 1024);
  const auto psi = PacketState(GaussianPacket::isotropic(1, 3.0, {0, 0, 0}, {1, 0, 0})).sample(g);
  const auto e = soft_pov_effect(psi, DetectorRegion::sphere(1, 5.0), 1.0);
  CHECK(e.survive.norm_squared() + e.detect.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.p_detect == doctest::Approx(e.detect.norm_squared()).epsilon(1e-12));
}

TEST_CASE("ledger is a product of conditional survivals") {
  const Grid g(1, 512.0, 2048);
  const auto psi = PacketState(GaussianPacket::isotropic(1, 2.0, {0, 0, 0}, {1, 0, 0})).sample(g);
  ZenoConfig z;
  z.period = 20;
  z.sigma1 = 0.5;
  z.n_max = 12;
  const auto axes = HistogramAxes::uniform(DirectionBinning::signs(), 1, 1, 2, 10, 2.0, 100, 1.0);
  const auto r = run_zeno(psi, DetectorRegion::sphere(1, 100), z, axes, {});
  REQUIRE(r.ledger.size() == 12);
  double s = 1;
  for (const auto& row : r.ledger) {
    s *= row.p_survive;
    CHECK(row.survival == doctest::Approx(s).epsilon(1e-12));
    CHECK(row.p_detect + row.p_survive == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(r.histogram.total() + r.ledger.back().survival == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Monte Carlo repetitions follow the ledger") {
  const Grid g(1, 512.0, 2048);
  const auto psi = PacketState(GaussianPacket::isotropic(1, 2.0, {0, 0, 0}, {1, 0, 0})).sample(g);
  ZenoConfig z;
  z.period = 20;
  z.sigma1 = 0.5;
  z.n_max = 10;
  z.mode = ZenoMode::MonteCarlo;
  z.seed = 4;
  const auto axes = HistogramAxes::uniform(DirectionBinning::signs(), 1, 1, 2, 10, 2.0, 100, 1.0);
  const auto r = run_zeno(psi, DetectorRegion::sphere(1, 100), z, axes, {}, 400);
  REQUIRE(r.detection_times.size() == 400);
  int survived = 0;
  for (double t : r.detection_times) survived += !std::isfinite(t);
  const double p = r.ledger.back().survival;
  CHECK(std::abs(survived / 400.0 - p) < 4 * std::sqrt(p * (1 - p) / 400.0) + 1e-3);
}

}
