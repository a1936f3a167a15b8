#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "detlab/experiments/compare.hpp"
#include "detlab/experiments/config.hpp"
#include "detlab/experiments/csv.hpp"
#include "detlab/experiments/scenarios.hpp"

using namespace detlab;
namespace ex = detlab::experiments;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("detlab-unit-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string pointer_of(const json& j) {
  try {
    ex::parse_config(j);
  } catch (const ex::ConfigError& e) {
    return e.pointer();
  }
  return "";
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("every scenario has parseable defaults") {
  for (const auto& name : ex::scenario_names()) {
    CAPTURE(name);
    const auto cfg = ex::parse_config(json{{"scenario", name}});
    CHECK(ex::kind_name(cfg.kind) == name);
    CHECK(cfg.resolved == ex::default_config_json(cfg.kind));
  }
  CHECK_THROWS_AS(ex::parse_kind("absorber-2d"), ex::ConfigError);
}

TEST_CASE("schema errors carry a JSON pointer") {
  CHECK(pointer_of({{"scenario", "zeno-1d"}, {"detector", {{"bogus", 1}}}}) == "/detector/bogus");
  CHECK(pointer_of({{"scenario", "zeno-1d"}, {"grid", {{"dx", "fine"}}}}) == "/grid/dx");
  CHECK(pointer_of({{"scenario", "zeno-1d"}, {"grid", {{"points", 48}}}}) == "/grid/points");
  CHECK(pointer_of({{"scenario", "absorber-1d"}, {"ladder", {{{"R", 10}, {"lambda", 1}}, {{"R", 5}, {"lambda", 0.5}}}}}) ==
        "/ladder");
  CHECK(pointer_of({{"scenario", "absorber-1d"}, {"ladder", {{{"R", 10}, {"lam", 1}}}}}) == "/ladder/0/lam");
  CHECK(pointer_of({{"scenario", "nope"}}) == "/scenario");
  CHECK(pointer_of({{"scenario", "zeno-1d"}, {"detector", {{"period", 0.0}}}}) != "");

  const auto err = ex::error_json(ex::ConfigError("/grid/dx", "bad"));
  CHECK(err["status"] == "error");
  CHECK(err["code"] == "configuration");
  CHECK(err["pointer"] == "/grid/dx");
}

TEST_CASE("config hash ignores run-only keys") {
  const auto a = ex::parse_config({{"scenario", "zeno-1d"}});
  const auto b = ex::parse_config({{"scenario", "zeno-1d"}, {"threads", 4}, {"output", "elsewhere"}});
  const auto c = ex::parse_config({{"scenario", "zeno-1d"}, {"seed", 2}});
  CHECK(ex::config_hash(a) == ex::config_hash(b));
  CHECK(ex::config_hash(a) != ex::config_hash(c));
  CHECK(ex::config_hash(a).size() == 16);
}

TEST_CASE("memory cap") {
  ::setenv("DETLAB_MEMORY_CAP_MB", "1", 1);
  CHECK_THROWS_AS(ex::check_memory(2e6, "test"), ResourceError);
  CHECK_NOTHROW(ex::check_memory(5e5, "test"));
  ::unsetenv("DETLAB_MEMORY_CAP_MB");
  CHECK_NOTHROW(ex::check_memory(2e6, "test"));
}

TEST_CASE("grid helpers") {
  const auto g = ex::line_grid(1000, 0.4, 0);
  CHECK(g.points() == 4096);
  CHECK(g.dx() == doctest::Approx(0.4));
  CHECK(ex::line_grid(0, 0.5, 64).length() == doctest::Approx(32));
  CHECK(ex::stable_dt(g, 0.0) == doctest::Approx(std::min(0.05, 1.2 / (g.k_max() * g.k_max()))));
  CHECK(ex::stable_dt(g, 0.01) == 0.01);
}

TEST_CASE("histogram CSV round trip") {
  const auto dir = scratch_dir("csv");
  for (bool three_d : {false, true}) {
    const auto dirs = three_d ? DirectionBinning::equal_area(3, 4) : DirectionBinning::signs();
    DetectionHistogram h(HistogramAxes::uniform(dirs, 2, 1.0, 1.5, 5, 2.0, 10, 1));
    for (int u = 0; u < dirs.count(); ++u) h.add(u, 1.1 + 0.1 * (u % 3), 0.3 * u, 0.01 * (u + 1));
    const auto path = dir / "h.csv";
    ex::write_histogram_csv(path.string(), h);
    const auto back = ex::read_histogram_csv(path.string());
    CHECK_NOTHROW(ex::check_same_binning(h.axes(), back.axes()));
    CHECK(back.weights() == h.weights());
  }
  CHECK(ex::format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(ex::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("comparison statistics") {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.1, 0.2, 0.1};
  const auto same = ex::compare_distributions(p, p, 3);
  CHECK(same.tv == doctest::Approx(0.0));
  CHECK(same.chi_square.p_value > 0.99);
  CHECK(same.ks_tau.statistic == doctest::Approx(0.0));

  const auto apart = ex::compare_distributions({0.5, 0.5, 0, 0}, {0, 0, 0.5, 0.5}, 2);
  CHECK(apart.tv == doctest::Approx(1.0));
  CHECK(apart.chi_square.p_value < 1e-10);

  // Counts are normalised before comparison.
  const auto counts = ex::compare_distributions({10, 20, 30, 10, 20, 10}, p, 3);
  CHECK(counts.tv == doctest::Approx(0.0).epsilon(1e-12));

  DetectionHistogram a(HistogramAxes::uniform(DirectionBinning::signs(), 1, 1, 2, 4, 2, 10, 1));
  DetectionHistogram b(HistogramAxes::uniform(DirectionBinning::signs(), 1, 1, 2, 5, 2, 10, 1));
  CHECK_THROWS_AS(ex::compare_histograms(a, b), ArgumentError);
}

TEST_CASE("zeno scenario writes reproducible artifacts") {
  const auto dir = scratch_dir("zeno");
  const auto cfg = ex::parse_config({{"scenario", "zeno-1d"}});
  const auto m = ex::run_scenario(cfg, (dir / "a").string());
  CHECK(m.status == "ok");
  CHECK(m.summary["max_relative_survival_error"].get<double>() < 0.03);
  for (const char* f : {"manifest.json", "config.resolved.json", "ledger.csv", "histogram.csv", "oracle.csv"})
    CHECK(fs::exists(dir / "a" / f));
  ex::run_scenario(cfg, (dir / "b").string());
  CHECK(slurp(dir / "a" / "ledger.csv") == slurp(dir / "b" / "ledger.csv"));
  CHECK(slurp(dir / "a" / "histogram.csv") == slurp(dir / "b" / "histogram.csv"));

  const auto ledger = ex::read_csv((dir / "a" / "ledger.csv").string());
  CHECK(ledger.header == std::vector<std::string>{"n", "t", "p_detect", "survival", "oracle", "width", "bound_ratio"});
  CHECK(ledger.rows.size() == 25);
}

}
