#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "detlab/core/errors.hpp"
#include "detlab/core/fourier.hpp"
#include "detlab/core/quadrature.hpp"
#include "detlab/core/random.hpp"
#include "detlab/core/sampler.hpp"
#include "detlab/core/special.hpp"
#include "detlab/core/stats.hpp"
#include "helpers.hpp"

using namespace detlab;

TEST_SUITE("core") {

TEST_CASE("grid rejects bad layouts") {
  CHECK_THROWS_AS(Grid(1, 10.0, 48), ConfigurationError);
  CHECK_THROWS_AS(Grid(1, 10.0, 4), ConfigurationError);
  CHECK_THROWS_AS(Grid(2, 10.0, 64), ConfigurationError);
  CHECK_THROWS_AS(Grid(1, -1.0, 64), ConfigurationError);
  const Grid g(3, 8.0, 16);
  CHECK(g.size() == 4096);
  CHECK(g.dx() == doctest::Approx(0.5));
  CHECK(g.coordinate(0) == doctest::Approx(-4.0));
  CHECK(g.k_max() == doctest::Approx(std::numbers::pi / 0.5));
}

TEST_CASE("flat and axis indices agree") {
  const Grid g(3, 1.0, 8);
  for (Index f = 0; f < g.size(); f += 37) {
    const auto a = g.axis_indices(f);
    CHECK(g.flat_index(a[0], a[1], a[2]) == f);
  }
}

TEST_CASE("forward transform of a Gaussian matches its closed form") {
  const double sigma = 1.3, k0 = 0.7;
  const Grid g(1, 80.0, 512);
  WaveField f(g);
  for (Index j = 0; j < g.points(); ++j) f.values[j] = testing::free_gaussian(g.coordinate(j), 0, sigma, k0);
  const auto s = forward_transform(f);
  double err = 0;
  for (Index j = 0; j < g.points(); ++j) {
    const double k = g.wavenumber(j);
    const auto exact = std::pow(2 * sigma * sigma / std::numbers::pi, 0.25) * std::exp(-sigma * sigma * (k - k0) * (k - k0));
    err = std::max(err, std::abs(s.values[j] - exact));
  }
  CHECK(err < 1e-12);
  const auto back = inverse_transform(s);
  CHECK((back.values - f.values).norm() < 1e-12);
}

TEST_CASE("3D transform is unitary") {
  const Grid g(3, 10.0, 16);
  RandomStream rng(5, 0);
  WaveField f(g);
  for (Index i = 0; i < g.size(); ++i) f.values[i] = {rng.normal(), rng.normal()};
  const auto s = forward_transform(f);
  CHECK(s.norm_squared() == doctest::Approx(f.norm_squared()).epsilon(1e-12));
  CHECK((inverse_transform(s).values - f.values).norm() < 1e-10);
}

TEST_CASE("complex erf against direct line integration") {
  // erf z = (2/√π) ∫₀¹ z e^{−(sz)²} ds, by Gauss–Legendre.
  auto line = [](std::complex<double> z) {
    return composite_gauss([&](double s) { return z * std::exp(-(s * z) * (s * z)); }, 0.0, 1.0, 40, 40) * 2.0 /
           std::sqrt(std::numbers::pi);
  };
  for (auto z : {std::complex<double>(0.4, 0.3), {1.7, -2.2}, {3.5, 1.0}, {-2.5, 4.0}, {6.0, 5.5}}) {
    const auto e = complex_erf(z);
    CHECK(std::abs(e - line(z)) <= 1e-10 * std::abs(e));
  }
  CHECK(std::real(complex_erf(std::complex<double>(0.8, 0))) == doctest::Approx(std::erf(0.8)).epsilon(1e-15));
  // Far from the origin with Re z dominant erf → 1; the series strip does not apply.
  CHECK(std::abs(complex_erf(std::complex<double>(60, 40)) - 1.0) < 1e-12);
  CHECK_THROWS_AS(complex_erf(std::complex<double>(0.5, 40)), DomainError);
}

TEST_CASE("Gauss-Legendre is exact to degree 2n-1") {
  const double v = gauss_quadrature([](double x) { return std::pow(x, 9) - 3 * x * x + 1; }, -1.0, 2.0, 5);
  CHECK(v == doctest::Approx(102.3 - 9 + 3).epsilon(1e-13));
  CHECK_THROWS_AS(gauss_quadrature([](double x) { return x; }, 1.0, 0.0, 4), ArgumentError);
}

TEST_CASE("random streams are reproducible and independent") {
  RandomStream a(11, 3), b(11, 3), c(11, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
  std::vector<double> v;
  for (int i = 0; i < 200000; ++i) v.push_back(a.normal());
  double m2 = 0;
  for (double x : v) m2 += x * x;
  CHECK(std::abs(mean(v)) < 0.01);
  CHECK(m2 / v.size() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("stats primitives") {
  CHECK(total_variation({0.5, 0.5}, {1.0, 0.0}) == doctest::Approx(0.5));
  // χ² with two degrees of freedom has survival e^{−x/2}.
  CHECK(chi_square_pvalue(3.0, 2) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
  const auto fit = loglog_slope({1, 2, 4, 8}, {3, 3 * std::pow(2, 1.5), 3 * std::pow(4, 1.5), 3 * std::pow(8, 1.5)});
  CHECK(fit.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(median({3, 1, 2}) == 2);
  CHECK(quantile({0, 1, 2, 3, 4}, 0.5) == doctest::Approx(2));

  RandomStream rng(2, 1);
  std::vector<double> u;
  for (int i = 0; i < 5000; ++i) u.push_back(rng.uniform());
  const auto ks = ks_test(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(ks.p_value > 0.01);
  const auto bad = ks_test(u, [](double x) { return std::clamp(x * x, 0.0, 1.0); });
  CHECK(bad.p_value < 1e-6);
}

TEST_CASE("sampler interpolates a plane-wave Gaussian and its gradient") {
  const double sigma = 3.0, k0 = 0.5;
  const Grid g(1, 128.0, 1024);
  WaveField f(g);
  for (Index j = 0; j < g.points(); ++j) f.values[j] = testing::free_gaussian(g.coordinate(j), 0, sigma, k0);
  const FieldSampler s(f);
  for (double x : {-2.33, 0.01, 4.7}) {
    const auto v = s({x, 0, 0});
    const auto psi = testing::free_gaussian(x, 0, sigma, k0);
    const auto dpsi = psi * std::complex<double>(-x / (2 * sigma * sigma), k0);
    CHECK(std::abs(v.value - psi) < 1e-6);
    CHECK(std::abs(v.gradient[0] - dpsi) < 1e-5);
  }
}

}
