#include "maghelm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "maghelm/report.hpp"

namespace maghelm::config {

using nlohmann::json;

const char* to_string(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::identity: return "identity";
    case Command::estimates: return "estimates";
    case Command::hardy: return "hardy";
    case Command::farfield: return "farfield";
    case Command::spectral: return "spectral";
    case Command::evolve: return "evolve";
    case Command::report: return "report";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  for (auto c : {Command::solve, Command::identity, Command::estimates, Command::hardy, Command::farfield,
                 Command::spectral, Command::evolve, Command::report})
    if (s == to_string(c)) return c;
  throw ConfigError("unknown command: " + s);
}

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get(const json& j, const char* key, const std::string& where, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad type for '") + key + "' in " + where);
  }
}

double num(const json& j, const char* key, const std::string& where, double def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' in " + where + " must be a number");
  return j.at(key).get<double>();
}

std::vector<double> grid(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return {};
  const auto& a = j.at(key);
  if (!a.is_array()) throw ConfigError(std::string("'") + key + "' in " + where + " must be an array");
  if (a.empty()) throw ConfigError("empty grid");
  std::vector<double> v;
  for (const auto& x : a) {
    if (!x.is_number()) throw ConfigError(std::string("'") + key + "' in " + where + " must hold numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

ProblemSpec parse_problem(const json& j, int& nodes) {
  const std::string w = "problem";
  only_keys(j, w, {"d", "lambda", "epsilon", "sign", "r_min", "r_max", "mode_cutoff", "nodes"});
  ProblemSpec p;
  p.d = get<int>(j, "d", w, p.d);
  p.lambda = num(j, "lambda", w, p.lambda);
  p.epsilon = num(j, "epsilon", w, p.epsilon);
  p.r_min = num(j, "r_min", w, p.r_min);
  p.r_max = num(j, "r_max", w, p.r_max);
  p.mode_cutoff = get<int>(j, "mode_cutoff", w, p.mode_cutoff);
  nodes = get<int>(j, "nodes", w, nodes);
  if (nodes < 16) throw ConfigError("problem.nodes must be at least 16");
  try {
    p.sign = sign_from_string(get<std::string>(j, "sign", w, "plus"));
    return validate_spec(p);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

PotentialSpec parse_potential(const json& j, int d) {
  if (!j.is_object()) throw ConfigError("potential must be an object");
  std::map<std::string, double> params;
  std::string kind = "free";
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "kind") {
      if (!it->is_string()) throw ConfigError("potential.kind must be a string");
      kind = it->get<std::string>();
    } else {
      if (!it->is_number()) throw ConfigError("potential." + it.key() + " must be a number");
      params[it.key()] = it->get<double>();
    }
  }
  try {
    return build_example(potential_kind_from_string(kind), params, d);
  } catch (const Error& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
}

Source parse_source(const json& j) {
  const std::string w = "f";
  only_keys(j, w, {"profile", "a", "b", "center", "width", "amplitude", "harmonics"});
  Source f;
  try {
    f.profile = profile_from_string(get<std::string>(j, "profile", w, "annulus"));
  } catch (const Error& e) {
    throw ConfigError(std::string("f: ") + e.what());
  }
  if (f.profile == Profile::custom) throw ConfigError("f: custom profiles are not available from a config");
  f.a = num(j, "a", w, f.a);
  f.b = num(j, "b", w, f.b);
  f.center = num(j, "center", w, f.center);
  f.width = num(j, "width", w, f.width);
  f.amplitude = num(j, "amplitude", w, f.amplitude);
  if ((f.profile == Profile::annulus || f.profile == Profile::bump) && !(0 <= f.a && f.a < f.b))
    throw ConfigError("f: need 0 <= a < b");
  if (f.profile == Profile::gaussian && !(f.width > 0)) throw ConfigError("f: width must be positive");
  if (j.contains("harmonics")) {
    if (!j["harmonics"].is_array()) throw ConfigError("f.harmonics must be an array");
    for (const auto& h : j["harmonics"]) {
      only_keys(h, "f.harmonics[]", {"l", "m", "re", "im"});
      HarmonicTerm t;
      t.l = get<int>(h, "l", "f.harmonics[]", 0);
      t.m = get<int>(h, "m", "f.harmonics[]", 0);
      t.coef = cplx(num(h, "re", "f.harmonics[]", 1.0), num(h, "im", "f.harmonics[]", 0.0));
      if (t.l < 0 || std::abs(t.m) > t.l) throw ConfigError("f.harmonics: need |m| <= l");
      f.harmonics.push_back(t);
    }
  }
  return f;
}

Options parse_options(const json& j) {
  const std::string w = "options";
  only_keys(j, w, {"solver", "compare", "tol", "multipliers", "R1", "kinds", "max_dispersion", "max_trend",
                   "expect_unbounded", "expect_range", "window", "log_points", "log_lo", "log_hi", "expect_warning",
                   "weight", "horizons", "input", "formats"});
  Options o;
  o.solver = get<std::string>(j, "solver", w, o.solver);
  if (o.solver != "fd" && o.solver != "green") throw ConfigError("options.solver must be fd or green");
  o.compare = get<bool>(j, "compare", w, o.compare);
  o.tol = num(j, "tol", w, o.tol);
  o.multipliers = get<std::vector<std::string>>(j, "multipliers", w, o.multipliers);
  o.R1 = num(j, "R1", w, o.R1);
  o.kinds = get<std::vector<std::string>>(j, "kinds", w, o.kinds);
  o.max_dispersion = num(j, "max_dispersion", w, o.max_dispersion);
  o.max_trend = num(j, "max_trend", w, o.max_trend);
  o.expect_unbounded = get<bool>(j, "expect_unbounded", w, o.expect_unbounded);
  o.expect_range = grid(j, "expect_range", w);
  if (!o.expect_range.empty() && o.expect_range.size() != 2) throw ConfigError("options.expect_range needs [lo, hi]");
  o.window = get<int>(j, "window", w, o.window);
  o.log_points = get<int>(j, "log_points", w, o.log_points);
  o.log_lo = num(j, "log_lo", w, o.log_lo);
  o.log_hi = num(j, "log_hi", w, o.log_hi);
  o.expect_warning = get<bool>(j, "expect_warning", w, o.expect_warning);
  o.weight = get<std::string>(j, "weight", w, o.weight);
  if (o.weight != "inverse_square" && o.weight != "one") throw ConfigError("options.weight must be inverse_square or one");
  o.horizons = grid(j, "horizons", w);
  o.input = get<std::string>(j, "input", w, o.input);
  o.formats = get<std::vector<std::string>>(j, "formats", w, o.formats);
  for (const auto& f : o.formats) {
    try {
      report::format_from_string(f);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  return o;
}

json canonical_json(const RunConfig& c, const json& potential) {
  json j;
  j["command"] = to_string(c.command);
  const auto& p = c.problem;
  j["problem"] = {{"d", p.d},         {"lambda", p.lambda}, {"epsilon", p.epsilon},         {"sign", to_string(p.sign)},
                  {"r_min", p.r_min}, {"r_max", p.r_max},   {"mode_cutoff", p.mode_cutoff}, {"nodes", c.nodes}};
  json pot = potential;
  pot["kind"] = to_string(c.potential.kind);
  j["potential"] = pot;
  const auto& f = c.f;
  json fj = {{"profile", to_string(f.profile)}, {"a", f.a},         {"b", f.b},
             {"center", f.center},              {"width", f.width}, {"amplitude", f.amplitude}};
  json hs = json::array();
  for (const auto& h : f.harmonics) hs.push_back({{"l", h.l}, {"m", h.m}, {"re", h.coef.real()}, {"im", h.coef.imag()}});
  fj["harmonics"] = hs;
  j["f"] = fj;
  j["sweep"] = {{"lambdas", c.sweep.lambdas}, {"epsilons", c.sweep.epsilons}, {"nodes", c.sweep.nodes}};
  const auto& o = c.options;
  j["options"] = {{"solver", o.solver},
                  {"compare", o.compare},
                  {"tol", o.tol},
                  {"multipliers", o.multipliers},
                  {"R1", o.R1},
                  {"kinds", o.kinds},
                  {"max_dispersion", o.max_dispersion},
                  {"max_trend", o.max_trend},
                  {"expect_unbounded", o.expect_unbounded},
                  {"expect_range", o.expect_range},
                  {"window", o.window},
                  {"log_points", o.log_points},
                  {"log_lo", o.log_lo},
                  {"log_hi", o.log_hi},
                  {"expect_warning", o.expect_warning},
                  {"weight", o.weight},
                  {"horizons", o.horizons},
                  {"input", o.input},
                  {"formats", o.formats}};
  j["seed"] = c.seed;
  return j;
}

}  // namespace

RunConfig parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j, "config", {"command", "problem", "potential", "f", "sweep", "options", "out", "seed"});
  RunConfig c;
  if (!j.contains("command")) throw ConfigError("config needs a command");
  c.command = command_from_string(get<std::string>(j, "command", "config", ""));
  c.problem = parse_problem(j.value("problem", json::object()), c.nodes);
  json pot = j.value("potential", json::object({{"kind", "free"}}));
  c.potential = parse_potential(pot, c.problem.d);
  pot.erase("kind");
  c.f = parse_source(j.value("f", json::object()));
  json sw = j.value("sweep", json::object());
  only_keys(sw, "sweep", {"lambdas", "epsilons", "nodes"});
  c.sweep.lambdas = grid(sw, "lambdas", "sweep");
  c.sweep.epsilons = grid(sw, "epsilons", "sweep");
  for (double n : grid(sw, "nodes", "sweep")) {
    if (n < 16 || n != (int)n) throw ConfigError("sweep.nodes must hold integers >= 16");
    c.sweep.nodes.push_back((int)n);
  }
  c.options = parse_options(j.value("options", json::object()));
  c.out = get<std::string>(j, "out", "config", c.out);
  c.seed = get<std::uint64_t>(j, "seed", "config", 0);
  c.canonical = canonical_json(c, pot).dump();
  return c;
}

RunConfig load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void set_seed(RunConfig& c, std::uint64_t seed) {
  c.seed = seed;
  json j = json::parse(c.canonical);
  j["seed"] = seed;
  c.canonical = j.dump();
}

std::string spec_hash(const RunConfig& c) {
  json j = json::parse(c.canonical);
  json k = {{"problem", j["problem"]}, {"potential", j["potential"]}, {"f", j["f"]}};
  return report::fnv1a_hex(k.dump());
}

}  // namespace maghelm::config
