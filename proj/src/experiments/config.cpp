#include "detlab/experiments/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace detlab::experiments {

using nlohmann::json;

namespace {

const std::vector<std::pair<std::string, ScenarioKind>>& kind_table() {
  static const std::vector<std::pair<std::string, ScenarioKind>> t{
      {"absorber-1d", ScenarioKind::Absorber1D},
      {"absorber-3d", ScenarioKind::Absorber3D},
      {"absorber-ellipsoid", ScenarioKind::AbsorberEllipsoid},
      {"zeno-1d", ScenarioKind::Zeno1D},
      {"zeno-3d", ScenarioKind::Zeno3D},
      {"bohm-ensemble", ScenarioKind::BohmEnsemble},
      {"dirac-suite", ScenarioKind::DiracSuite},
      {"oracle-table", ScenarioKind::OracleTable},
      {"classical-nosignal", ScenarioKind::ClassicalNoSignal},
  };
  return t;
}

json vec(double x, double y, double z) { return json::array({x, y, z}); }

json base_config(const std::string& name) {
  return {
      {"scenario", name},
      {"seed", 1},
      {"threads", 1},
      {"deterministic", true},
      {"output", "detlab-out"},
      {"units", {{"hbar", 1.0}, {"mass", 1.0}, {"c", 1.0}}},
      {"state", {{"family", "gaussian"}, {"sigma", 1.0}, {"x0", vec(0, 0, 0)}, {"k0", vec(0, 0, 0)}, {"file", ""}}},
      {"grid",
       {{"points", 0}, {"dx", 0.0}, {"length", 0.0}, {"margin", 20.0}, {"dt", 0.0}, {"edge_threshold", 1e-8},
        {"radial", true}}},
      {"detector",
       {{"shape", "sphere"}, {"axes", vec(1, 1, 1)}, {"R", 0.0}, {"lambda", 0.0}, {"period", 0.0},
        {"sigma1", 0.0}, {"c1", 3.0}, {"c2", 1.0 / 3.0}, {"n_max", 0}, {"sharp", false},
        {"monte_carlo", false}, {"repetitions", 1000}, {"t_factor", 4.0}, {"lag_factor", 40.0}}},
      {"histogram",
       {{"bands", 8}, {"sectors", 8}, {"n_rho", 1}, {"rho_lo", 1.0}, {"rho_hi", 2.0}, {"n_tau", 20},
        {"tau_hi", 2.0}, {"reference_speed", 0.0}}},
      {"ladder", json::array()},
      {"bohm", {{"n_traj", 2000}, {"lambdas", {0.05, 0.1, 0.2}}, {"dt", 0.05}, {"stride", 5}}},
      {"dirac",
       {{"sigma_k", 0.25}, {"k0", vec(0, 0, 0.577)}, {"times", {100.0, 200.0, 400.0}}, {"helix_pairs", 100},
        {"step_lambdas", {0.01, 0.02, 0.04, 0.08}}, {"step_k", vec(0.3, 0.2, 0.8)}, {"electron_units", false}}},
      {"nosignal",
       {{"samples", 1000000}, {"k0", vec(0, 0, 0.5)}, {"sigma_k", 0.3}, {"R", 10.0}, {"T", 60.0},
        {"t_sigma", 40.0}}},
  };
}

json rung(double R, double lambda) { return {{"R", R}, {"lambda", lambda}}; }

[[noreturn]] void fail(const std::string& ptr, const std::string& what) { throw ConfigError(ptr, what); }

/// Every key in `user` must exist in `ref` with a compatible JSON type.
void check_keys(const json& user, const json& ref, const std::string& ptr) {
  if (ref.is_object()) {
    if (!user.is_object()) fail(ptr.empty() ? "/" : ptr, "expected an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
      const std::string p = ptr + "/" + it.key();
      if (!ref.contains(it.key())) fail(p, "unknown key");
      check_keys(it.value(), ref.at(it.key()), p);
    }
    return;
  }
  if (ref.is_number() && !user.is_number()) fail(ptr, "expected a number");
  if (ref.is_boolean() && !user.is_boolean()) fail(ptr, "expected a boolean");
  if (ref.is_string() && !user.is_string()) fail(ptr, "expected a string");
  if (ref.is_array() && !user.is_array()) fail(ptr, "expected an array");
}

double num(const json& j, const std::string& ptr) {
  const json& v = j.at(json::json_pointer(ptr));
  if (!v.is_number()) fail(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(ptr, "must be finite");
  return x;
}
double positive(const json& j, const std::string& ptr) {
  const double x = num(j, ptr);
  if (!(x > 0)) fail(ptr, "must be positive");
  return x;
}
double non_negative(const json& j, const std::string& ptr) {
  const double x = num(j, ptr);
  if (!(x >= 0)) fail(ptr, "must be >= 0");
  return x;
}
int integer(const json& j, const std::string& ptr, int lo) {
  const json& v = j.at(json::json_pointer(ptr));
  if (!v.is_number_integer()) fail(ptr, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > 1'000'000'000) fail(ptr, "must be >= " + std::to_string(lo));
  return static_cast<int>(x);
}
Eigen::Vector3d vector3(const json& j, const std::string& ptr) {
  const json& v = j.at(json::json_pointer(ptr));
  if (!v.is_array() || v.size() != 3) fail(ptr, "expected [x, y, z]");
  Eigen::Vector3d out;
  for (int a = 0; a < 3; ++a) out[a] = num(j, ptr + "/" + std::to_string(a));
  return out;
}
std::vector<double> positive_list(const json& j, const std::string& ptr) {
  const json& v = j.at(json::json_pointer(ptr));
  std::vector<double> out;
  for (size_t i = 0; i < v.size(); ++i) out.push_back(positive(j, ptr + "/" + std::to_string(i)));
  return out;
}

bool needs_detector(ScenarioKind k) {
  return k != ScenarioKind::DiracSuite && k != ScenarioKind::ClassicalNoSignal;
}
bool is_absorber(ScenarioKind k) {
  return k == ScenarioKind::Absorber1D || k == ScenarioKind::Absorber3D || k == ScenarioKind::AbsorberEllipsoid;
}
bool is_zeno(ScenarioKind k) { return k == ScenarioKind::Zeno1D || k == ScenarioKind::Zeno3D; }

} // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, k] : kind_table()) v.push_back(n);
    return v;
  }();
  return names;
}

std::string kind_name(ScenarioKind k) {
  for (const auto& [n, kk] : kind_table())
    if (kk == k) return n;
  return "?";
}

ScenarioKind parse_kind(const std::string& name) {
  for (const auto& [n, k] : kind_table())
    if (n == name) return k;
  throw ConfigError("/scenario", "unknown scenario '" + name + "'");
}

json default_config_json(ScenarioKind kind) {
  json j = base_config(kind_name(kind));
  switch (kind) {
    case ScenarioKind::Absorber1D:
      j["state"]["k0"] = vec(2, 0, 0);
      j["grid"].update({{"dx", 0.4}, {"dt", 0.02}});
      j["detector"].update({{"R", 160.0}, {"lambda", 0.25}});
      j["ladder"] = {rung(40, 0.5), rung(80, 0.375), rung(160, 0.25)};
      break;
    case ScenarioKind::Absorber3D:
      j["state"].update({{"family", "shell"}, {"sigma", 0.7}, {"k0", vec(3, 0, 0)}});
      j["grid"].update({{"points", 256}, {"margin", 7.0}, {"edge_threshold", 1e-3}});
      j["detector"].update({{"R", 40.0}, {"lambda", 1.0}});
      j["histogram"].update({{"bands", 2}, {"sectors", 2}});
      j["ladder"] = {rung(20, 1.5), rung(30, 1.25), rung(40, 1.0)};
      break;
    case ScenarioKind::AbsorberEllipsoid:
      j["state"].update({{"sigma", 1.0}, {"k0", vec(0.4, 0.3, 0.8)}});
      j["grid"].update({{"points", 64}, {"margin", 8.0}, {"edge_threshold", 1e-3}, {"radial", false}});
      j["detector"].update({{"shape", "ellipsoid"}, {"axes", vec(1, 1, 1.5)}, {"R", 6.0}, {"lambda", 1.0},
                            {"t_factor", 2.5}, {"lag_factor", 10.0}});
      j["histogram"].update({{"bands", 4}, {"sectors", 4}, {"n_tau", 10}, {"tau_hi", 3.0}});
      j["ladder"] = {rung(6, 1.0)};
      break;
    case ScenarioKind::Zeno1D:
      j["state"].update({{"sigma", 2.0}, {"k0", vec(1, 0, 0)}});
      j["grid"].update({{"dx", 0.5}});
      j["detector"].update({{"R", 4000.0}, {"period", 400.0}, {"sigma1", 0.8}, {"n_max", 25}});
      j["histogram"].update({{"tau_hi", 2.05}, {"reference_speed", 1.0}});
      break;
    case ScenarioKind::Zeno3D:
      j["state"].update({{"family", "shell"}, {"sigma", 2.0}, {"k0", vec(1, 0, 0)}});
      j["grid"].update({{"dx", 0.5}});
      j["detector"].update({{"R", 4000.0}, {"period", 400.0}, {"sigma1", 0.8}, {"n_max", 25}});
      j["histogram"].update({{"tau_hi", 2.05}, {"reference_speed", 1.0}});
      j["histogram"].update({{"bands", 2}, {"sectors", 2}});
      break;
    case ScenarioKind::BohmEnsemble:
      j["state"]["k0"] = vec(2, 0, 0);
      j["grid"].update({{"dx", 0.4}});
      j["detector"].update({{"R", 20.0}});
      break;
    case ScenarioKind::OracleTable:
      j["state"].update({{"k0", vec(0.3, 0.0, 1.0)}});
      j["detector"].update({{"R", 100.0}, {"period", 10.0}, {"n_max", 20}});
      j["histogram"].update({{"bands", 4}, {"sectors", 4}, {"n_tau", 16}, {"tau_hi", 4.0}});
      break;
    case ScenarioKind::DiracSuite:
    case ScenarioKind::ClassicalNoSignal:
      break;
  }
  return j;
}

ScenarioConfig parse_config(const json& user) {
  if (!user.is_object()) fail("/", "expected an object");
  if (!user.contains("scenario") || !user["scenario"].is_string()) fail("/scenario", "missing scenario name");
  const ScenarioKind kind = parse_kind(user["scenario"].get<std::string>());
  json j = default_config_json(kind);
  check_keys(user, j, "");
  if (user.contains("ladder"))
    for (size_t i = 0; i < user["ladder"].size(); ++i)
      check_keys(user["ladder"][i], rung(1, 1), "/ladder/" + std::to_string(i));
  // Arrays replace wholesale; objects merge key by key.
  j.merge_patch(user);

  ScenarioConfig c;
  c.kind = kind;
  c.resolved = j;
  {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      fail("/seed", "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  c.threads = integer(j, "/threads", 1);
  c.deterministic = j.at("deterministic").get<bool>();
  c.output = j.at("output").get<std::string>();
  c.units = {positive(j, "/units/hbar"), positive(j, "/units/mass"), positive(j, "/units/c")};

  c.state.family = j.at("/state/family"_json_pointer).get<std::string>();
  if (c.state.family != "gaussian" && c.state.family != "shell" && c.state.family != "field")
    fail("/state/family", "expected gaussian, shell or field");
  c.state.sigma = positive(j, "/state/sigma");
  c.state.x0 = vector3(j, "/state/x0");
  c.state.k0 = vector3(j, "/state/k0");
  c.state.file = j.at("/state/file"_json_pointer).get<std::string>();
  if (c.state.family == "field" && c.state.file.empty()) fail("/state/file", "required for family = field");
  if (c.state.family == "shell" && !(c.state.k0.norm() > 0)) fail("/state/k0", "shell needs |k0| > 0");

  c.grid.points = integer(j, "/grid/points", 0);
  c.grid.dx = non_negative(j, "/grid/dx");
  c.grid.length = non_negative(j, "/grid/length");
  c.grid.margin = positive(j, "/grid/margin");
  c.grid.dt = non_negative(j, "/grid/dt");
  c.grid.edge_threshold = positive(j, "/grid/edge_threshold");
  c.grid.radial = j.at("/grid/radial"_json_pointer).get<bool>();
  if (c.grid.points > 0 && (c.grid.points < 8 || (c.grid.points & (c.grid.points - 1)) != 0))
    fail("/grid/points", "must be a power of two >= 8");

  auto& d = c.detector;
  d.shape = j.at("/detector/shape"_json_pointer).get<std::string>();
  if (d.shape != "sphere" && d.shape != "ellipsoid") fail("/detector/shape", "expected sphere or ellipsoid");
  d.axes = vector3(j, "/detector/axes");
  if (!(d.axes.minCoeff() > 0)) fail("/detector/axes", "semi-axes must be positive");
  d.R = non_negative(j, "/detector/R");
  d.lambda = non_negative(j, "/detector/lambda");
  d.period = non_negative(j, "/detector/period");
  d.sigma1 = non_negative(j, "/detector/sigma1");
  d.c1 = positive(j, "/detector/c1");
  d.c2 = positive(j, "/detector/c2");
  d.n_max = integer(j, "/detector/n_max", 0);
  d.sharp = j.at("/detector/sharp"_json_pointer).get<bool>();
  d.monte_carlo = j.at("/detector/monte_carlo"_json_pointer).get<bool>();
  d.repetitions = integer(j, "/detector/repetitions", 1);
  d.t_factor = positive(j, "/detector/t_factor");
  d.lag_factor = non_negative(j, "/detector/lag_factor");
  if (needs_detector(kind) && !(d.R > 0)) fail("/detector/R", "must be positive");
  if (is_zeno(kind)) {
    if (!(d.period > 0)) fail("/detector/period", "must be positive");
    if (!(d.sigma1 > 0)) fail("/detector/sigma1", "must be positive");
    if (d.n_max < 1) fail("/detector/n_max", "must be >= 1");
  }

  auto& h = c.histogram;
  h.bands = integer(j, "/histogram/bands", 1);
  h.sectors = integer(j, "/histogram/sectors", 1);
  h.n_rho = integer(j, "/histogram/n_rho", 1);
  h.rho_lo = num(j, "/histogram/rho_lo");
  h.rho_hi = num(j, "/histogram/rho_hi");
  if (!(h.rho_lo < h.rho_hi)) fail("/histogram/rho_hi", "must exceed rho_lo");
  h.n_tau = integer(j, "/histogram/n_tau", 1);
  h.tau_hi = positive(j, "/histogram/tau_hi");
  h.reference_speed = non_negative(j, "/histogram/reference_speed");

  const json& lad = j.at("ladder");
  for (size_t i = 0; i < lad.size(); ++i) {
    const std::string p = "/ladder/" + std::to_string(i);
    c.ladder.push_back({positive(j, p + "/R"), positive(j, p + "/lambda")});
  }
  if (is_absorber(kind)) {
    if (c.ladder.empty()) c.ladder.push_back({d.R, d.lambda});
    try {
      validate_ladder(c.ladder);
    } catch (const ConfigurationError& e) {
      fail("/ladder", e.what());
    }
  }

  c.bohm.n_traj = integer(j, "/bohm/n_traj", 1);
  c.bohm.lambdas = positive_list(j, "/bohm/lambdas");
  c.bohm.dt = positive(j, "/bohm/dt");
  c.bohm.stride = integer(j, "/bohm/stride", 1);
  if (kind == ScenarioKind::BohmEnsemble && c.bohm.lambdas.size() < 3)
    fail("/bohm/lambdas", "need at least three values for the slope fits");

  c.dirac.sigma_k = positive(j, "/dirac/sigma_k");
  c.dirac.k0 = vector3(j, "/dirac/k0");
  c.dirac.times = positive_list(j, "/dirac/times");
  c.dirac.helix_pairs = integer(j, "/dirac/helix_pairs", 1);
  c.dirac.step_lambdas = positive_list(j, "/dirac/step_lambdas");
  c.dirac.step_k = vector3(j, "/dirac/step_k");
  c.dirac.electron_units = j.at("/dirac/electron_units"_json_pointer).get<bool>();

  c.nosignal.samples = integer(j, "/nosignal/samples", 1);
  c.nosignal.k0 = vector3(j, "/nosignal/k0");
  c.nosignal.sigma_k = positive(j, "/nosignal/sigma_k");
  c.nosignal.R = positive(j, "/nosignal/R");
  c.nosignal.T = positive(j, "/nosignal/T");
  c.nosignal.t_sigma = positive(j, "/nosignal/t_sigma");
  if (!(c.nosignal.T > c.nosignal.t_sigma)) fail("/nosignal/T", "cap time must exceed t_sigma");
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("parse error: ") + e.what());
  }
  return parse_config(j);
}

ScenarioConfig default_config(ScenarioKind kind) { return parse_config(default_config_json(kind)); }

std::string config_hash(const ScenarioConfig& cfg) {
  json j = cfg.resolved;
  j.erase("threads");
  j.erase("output");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void check_memory(double bytes, const std::string& what) {
  double cap_mb = 4096;
  if (const char* env = std::getenv("DETLAB_MEMORY_CAP_MB")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || !(v > 0)) throw ConfigurationError("DETLAB_MEMORY_CAP_MB must be a positive number");
    cap_mb = v;
  }
  if (bytes > cap_mb * 1024.0 * 1024.0) {
    std::ostringstream os;
    os << what << " needs about " << bytes / (1024.0 * 1024.0) << " MB, above the cap of " << cap_mb << " MB";
    throw ResourceError(os.str());
  }
}

} // namespace detlab::experiments
