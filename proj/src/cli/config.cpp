#include "mfgpi/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace mfg {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf" || t == "infinity") return kUnbounded;
  if (t.empty()) throw ConfigError(key, "empty value");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || std::isnan(v)) {
    throw ConfigError(key, "expected a number, got '" + t + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(key, "empty value");
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE || v > 1000000000L || v < -1000000000L) {
    throw ConfigError(key, "expected an integer, got '" + t + "'");
  }
  return static_cast<int>(v);
}

std::string json_value_text(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  throw ConfigError(key, "expected a string or number in JSON");
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(value);
  if (key == "scenario") {
    if (!parse_scenario_name(v)) throw ConfigError(key, "unknown scenario '" + v + "'");
    c.scenario = v;
  } else if (key == "algorithm") {
    if (!parse_algorithm(v)) throw ConfigError(key, "unknown algorithm '" + v + "'");
    c.algorithm = v;
  } else if (key == "beta") {
    c.beta = parse_real(key, v);
  } else if (key == "zeta") {
    c.zeta = parse_real(key, v);
  } else if (key == "T") {
    c.horizon = parse_real(key, v);
  } else if (key == "I") {
    c.nodes = parse_int(key, v);
  } else if (key == "N") {
    c.steps = parse_int(key, v);
  } else if (key == "epsilon") {
    c.epsilon = parse_real(key, v);
  } else if (key == "R") {
    c.bound = parse_real(key, v);
  } else if (key == "tol") {
    c.tol = parse_real(key, v);
  } else if (key == "max_iters") {
    c.max_iters = parse_int(key, v);
  } else if (key == "output_dir") {
    if (v.empty()) throw ConfigError(key, "empty value");
    c.output_dir = v;
  } else if (key == "linear_solver") {
    if (v != "direct" && v != "krylov") throw ConfigError(key, "expected direct or krylov");
    c.linear_solver = v;
  } else if (key == "newton_tol") {
    c.newton_tol = parse_real(key, v);
  } else if (key == "newton_max_iters") {
    c.newton_max_iters = parse_int(key, v);
  } else if (key == "blowup") {
    c.blowup = parse_real(key, v);
  } else if (key == "pi1_source") {
    if (v != "lagrangian" && v != "perturbed") {
      throw ConfigError(key, "expected lagrangian or perturbed");
    }
    c.pi1_source = v;
  } else {
    throw ConfigError(key, "unknown key");
  }
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": missing key");
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
    apply_setting(config, key, line.substr(eq + 1));
  }
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("", "malformed JSON in '" + path + "': " + e.what());
    }
    const nlohmann::json& object = doc.contains("config") ? doc["config"] : doc;
    if (!object.is_object()) throw ConfigError("config", "expected a JSON object");
    RunConfig config;
    for (const auto& [key, value] : object.items()) {
      apply_setting(config, key, json_value_text(key, value));
    }
    return config;
  }
  return parse_config_text(text);
}

void apply_overrides(RunConfig& config, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("", "--set expects key=value, got '" + a + "'");
    apply_setting(config, a.substr(0, eq), a.substr(eq + 1));
  }
}

SolverConfig to_solver_config(const RunConfig& c) {
  if (c.nodes && *c.nodes < 3) throw ConfigError("I", "must be at least 3");
  if (c.steps && *c.steps < 1) throw ConfigError("N", "must be at least 1");
  if (c.horizon && !(*c.horizon > 0.0 && std::isfinite(*c.horizon))) {
    throw ConfigError("T", "must be positive and finite");
  }
  if (c.beta && !(*c.beta > 0.0 && std::isfinite(*c.beta))) {
    throw ConfigError("beta", "must be positive and finite");
  }
  if (c.zeta && !(*c.zeta >= 0.0 && std::isfinite(*c.zeta))) {
    throw ConfigError("zeta", "must be non-negative and finite");
  }
  if (c.epsilon && !(*c.epsilon > 0.0 && std::isfinite(*c.epsilon))) {
    throw ConfigError("epsilon", "must be positive and finite");
  }
  if (!(c.bound > 0.0)) throw ConfigError("R", "must be positive or inf");
  if (!(c.tol > 0.0 && std::isfinite(c.tol))) throw ConfigError("tol", "must be positive");
  if (c.max_iters && *c.max_iters < 1) throw ConfigError("max_iters", "must be at least 1");
  if (!(c.newton_tol > 0.0 && std::isfinite(c.newton_tol))) {
    throw ConfigError("newton_tol", "must be positive");
  }
  if (c.newton_max_iters < 1) throw ConfigError("newton_max_iters", "must be at least 1");
  if (!(c.blowup > 0.0)) throw ConfigError("blowup", "must be positive");

  const auto name = parse_scenario_name(c.scenario);
  if (!name) throw ConfigError("scenario", "unknown scenario '" + c.scenario + "'");
  const auto algorithm = parse_algorithm(c.algorithm);
  if (!algorithm) throw ConfigError("algorithm", "unknown algorithm '" + c.algorithm + "'");

  SolverConfig s;
  try {
    s.scenario = build_scenario(
        *name, ScenarioOverrides{c.beta, c.zeta, c.horizon, c.nodes, c.steps, c.epsilon});
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scenario", e.what());
  }
  s.algorithm = *algorithm;
  s.tol_density = c.tol;
  s.max_outer_iters = c.max_iters.value_or(kDefaultMaxIters);
  s.bound = c.bound;
  s.newton.tol = c.newton_tol;
  s.newton.max_iters = c.newton_max_iters;
  s.linear.method = c.linear_solver == "krylov" ? LinearSolveSettings::Method::krylov
                                                : LinearSolveSettings::Method::direct;
  s.blowup_threshold = c.blowup;
  s.pi1_source = c.pi1_source == "perturbed" ? Pi1Source::perturbed : Pi1Source::lagrangian;
  return s;
}

nlohmann::json resolved_config_json(const RunConfig& c) {
  const SolverConfig s = to_solver_config(c);
  const ScenarioPreset& p = s.scenario;
  nlohmann::json j;
  j["scenario"] = c.scenario;
  j["algorithm"] = c.algorithm;
  j["beta"] = p.beta;
  j["zeta"] = p.model.zeta();
  j["T"] = p.horizon;
  j["I"] = p.nodes;
  j["N"] = p.steps;
  j["epsilon"] = p.epsilon;
  if (std::isinf(c.bound)) {
    j["R"] = "inf";
  } else {
    j["R"] = c.bound;
  }
  j["tol"] = c.tol;
  j["max_iters"] = s.max_outer_iters;
  j["output_dir"] = c.output_dir;
  j["linear_solver"] = c.linear_solver;
  j["newton_tol"] = c.newton_tol;
  j["newton_max_iters"] = c.newton_max_iters;
  j["blowup"] = c.blowup;
  j["pi1_source"] = c.pi1_source;
  return j;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_real(what, item));
  }
  if (out.empty()) throw ConfigError(what, "empty list");
  return out;
}

}  // namespace mfg
