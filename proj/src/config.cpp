#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "trqd/scenario.hpp"

namespace trqd {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& key) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' has non-numeric value '" + value + "'");
  }
  if (used != value.size())
    throw std::invalid_argument("config: key '" + key + "' has trailing junk in '" + value + "'");
  return out;
}

long parse_long(const std::string& value, const std::string& key) {
  const double d = parse_double(value, key);
  if (d != std::floor(d))
    throw std::invalid_argument("config: key '" + key + "' must be an integer");
  return static_cast<long>(d);
}

}  // namespace

ScenarioConfig parse_scenario_config(std::istream& in) {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']')
        throw std::invalid_argument("config: malformed section header at line " +
                                    std::to_string(line_no));
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected 'key = value' at line " +
                                  std::to_string(line_no));
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config: empty key or value at line " + std::to_string(line_no));
    if (!sections[section].emplace(key, value).second)
      throw std::invalid_argument("config: duplicate key '" + key + "' in section [" + section + "]");
  }

  ScenarioConfig config;
  bool have_type = false, have_a = false, have_tf = false;

  for (const auto& [sec, entries] : sections) {
    for (const auto& [key, value] : entries) {
      const std::string where = "[" + sec + "] " + key;
      if (sec == "scenario") {
        if (key == "type") { config.scenario = scenario_type_from_string(value); have_type = true; }
        else if (key == "family") config.family = rescaling_family_from_string(value);
        else if (key == "a") { config.a = parse_double(value, where); have_a = true; }
        else if (key == "t_f") { config.t_f = parse_double(value, where); have_tf = true; }
        else throw std::invalid_argument("config: unknown key '" + key + "' in section [scenario]");
      } else if (sec == "model") {
        if (key == "omega0") config.omega0 = parse_double(value, where);
        else if (key == "omega_f") config.omega_f = parse_double(value, where);
        else if (key == "omega") config.omega = parse_double(value, where);
        else if (key == "distance") config.distance = parse_double(value, where);
        else if (key == "b0") config.b0 = parse_double(value, where);
        else if (key == "gamma") config.gamma = parse_double(value, where);
        else if (key == "tilt") config.tilt = parse_double(value, where);
        else if (key == "rotation_rate") config.rotation_rate = parse_double(value, where);
        else if (key == "mass") config.mass = parse_double(value, where);
        else if (key == "hbar") config.hbar = parse_double(value, where);
        else if (key == "basis_dim") config.basis_dim = static_cast<int>(parse_long(value, where));
        else if (key == "basis_frequency") config.basis_frequency = parse_double(value, where);
        else throw std::invalid_argument("config: unknown key '" + key + "' in section [model]");
      } else if (sec == "solver") {
        if (key == "n_steps") config.n_steps = parse_long(value, where);
        else if (key == "target_tol") config.target_tol = parse_double(value, where);
        else if (key == "max_steps") config.max_steps = parse_long(value, where);
        else if (key == "n_start") config.n_start = parse_long(value, where);
        else if (key == "trajectory_samples") config.trajectory_samples = static_cast<int>(parse_long(value, where));
        else if (key == "quadrature_points") config.quadrature_points = static_cast<int>(parse_long(value, where));
        else if (key == "norm_samples") config.norm_samples = static_cast<int>(parse_long(value, where));
        else throw std::invalid_argument("config: unknown key '" + key + "' in section [solver]");
      } else if (sec == "output") {
        if (key == "dir") config.output_dir = value;
        else if (key == "fidelity_threshold") config.fidelity_threshold = parse_double(value, where);
        else if (key == "waveform_rows") config.waveform_rows = static_cast<int>(parse_long(value, where));
        else throw std::invalid_argument("config: unknown key '" + key + "' in section [output]");
      } else {
        throw std::invalid_argument("config: unknown section [" + sec + "]");
      }
    }
  }

  if (!have_type) throw std::invalid_argument("config: [scenario] type is required");
  if (!have_a) throw std::invalid_argument("config: [scenario] a is required");
  if (!have_tf) throw std::invalid_argument("config: [scenario] t_f is required");
  if (!(config.a > 0.0)) throw std::invalid_argument("config: a must be > 0");
  if (!(config.t_f > 0.0)) throw std::invalid_argument("config: t_f must be > 0");
  if (config.basis_dim < 2) throw std::invalid_argument("config: basis_dim must be >= 2");
  if (config.n_steps < 0)
    throw std::invalid_argument("config: n_steps must be >= 0 (0 selects step refinement)");
  if (config.trajectory_samples != 0 && config.trajectory_samples < 2)
    throw std::invalid_argument("config: trajectory_samples must be 0 or >= 2");
  return config;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  return parse_scenario_config(in);
}

}  // namespace trqd
