#include "ensmhd/config.hpp"

#include "ensmhd/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace ensmhd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) items.push_back(trim(item));
  return items;
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& source) {
  ConfigFile cfg;
  cfg.source_ = source;
  std::string section;
  std::string raw;
  int line = 0;
  auto error = [&](const std::string& what) { return ConfigError(source + ":" + std::to_string(line) + ": " + what); };
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw error("unterminated section header");
      section = lower(trim(s.substr(1, s.size() - 2)));
      if (section.empty()) throw error("empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw error("expected 'key = value'");
    const std::string key = lower(trim(s.substr(0, eq)));
    std::string value = trim(s.substr(eq + 1));
    const auto hash = value.find('#');
    if (hash != std::string::npos) value = trim(value.substr(0, hash));
    if (key.empty()) throw error("missing key");
    if (value.empty()) throw error("missing value for '" + key + "'");
    if (!cfg.entries_.emplace(std::make_pair(section, key), Entry{value, line}).second)
      throw error("duplicate key '" + key + "'");
  }
  if (in.bad()) throw ConfigError(source + ": read error");
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section, const std::string& key) const {
  const auto k = std::make_pair(section, key);
  const auto it = entries_.find(k);
  if (it == entries_.end()) return nullptr;
  used_.insert(k);
  return &it->second;
}

void ConfigFile::fail(const Entry& e, const std::string& section, const std::string& key,
                      const std::string& what) const {
  throw ConfigError(source_ + ":" + std::to_string(e.line) + ": [" + section + "] " + key + ": " + what);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return entries_.count({section, key}) > 0;
}

std::optional<std::string> ConfigFile::text(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return e->value;
}

double ConfigFile::number(const std::string& section, const std::string& key, double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  double v = 0.0;
  if (!parse_double(e->value, v)) fail(*e, section, key, "expected a number, got '" + e->value + "'");
  return v;
}

int ConfigFile::integer(const std::string& section, const std::string& key, int fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  int v = 0;
  if (!parse_int(e->value, v)) fail(*e, section, key, "expected an integer, got '" + e->value + "'");
  return v;
}

bool ConfigFile::flag(const std::string& section, const std::string& key, bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  const std::string v = lower(e->value);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(*e, section, key, "expected true or false, got '" + e->value + "'");
}

std::vector<double> ConfigFile::numbers(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(e->value)) {
    double v = 0.0;
    if (!parse_double(item, v)) fail(*e, section, key, "bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<int> ConfigFile::integers(const std::string& section, const std::string& key,
                                      const std::vector<int>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(e->value)) {
    int v = 0;
    if (!parse_int(item, v)) fail(*e, section, key, "bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void ConfigFile::reject_unused() const {
  for (const auto& [k, e] : entries_)
    if (!used_.count(k))
      throw ConfigError(source_ + ":" + std::to_string(e.line) + ": unknown key '" + k.second + "' in section [" +
                        k.first + "]");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::mms_temporal: return "mms-temporal";
    case Experiment::mms_spatial: return "mms-spatial";
    case Experiment::channel_step: return "channel-step";
    case Experiment::bench: return "bench";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::mms_temporal, Experiment::mms_spatial, Experiment::channel_step, Experiment::bench})
    if (to_string(e) == name) return e;
  throw ConfigError("unknown experiment '" + name + "'");
}

double RunConfig::resolved_theta() const { return theta < 0.0 ? select_theta(phys.nu, phys.nu_m) : theta; }

RunConfig default_config(Experiment experiment) {
  RunConfig c;
  c.experiment = experiment;
  switch (experiment) {
    case Experiment::mms_temporal:
      c.phys = {0.01, 0.001, 1.0};
      c.end_time = 1.0;
      c.grid = 16;
      c.step_levels = {4, 8, 16, 32, 64};
      c.epsilon = 0.01;
      break;
    case Experiment::mms_spatial:
      c.phys = {0.01, 0.001, 1.0};
      c.end_time = 0.001;
      c.steps = 8;
      c.grids = {4, 8, 16, 32};
      c.epsilon = 0.01;
      break;
    case Experiment::channel_step:
      c.phys = {0.001, 0.01, 0.001};
      c.dt = 1.0;
      c.end_time = 40.0;
      c.pair = ElementPair::scott_vogelius;
      c.target_h = 0.85;
      c.epsilons = {0.1, 0.01, 0.001};
      break;
    case Experiment::bench:
      c.phys = {0.01, 0.001, 1.0};
      c.end_time = 0.03;
      c.dt = 0.01;
      c.grid = 16;
      c.epsilon = 0.01;
      c.bench_members = {1, 2, 4};
      break;
  }
  c.dt = experiment == Experiment::mms_spatial ? c.end_time / c.steps : c.dt;
  return c;
}

RunConfig read_run_config(const ConfigFile& f, Experiment experiment) {
  RunConfig c = default_config(experiment);
  if (auto kind = f.text("experiment", "kind"); kind && parse_experiment(*kind) != experiment)
    throw ConfigError("config is for '" + *kind + "' but the '" + to_string(experiment) + "' subcommand was run");

  c.phys.nu = f.number("physics", "nu", c.phys.nu);
  c.phys.nu_m = f.number("physics", "nu_m", c.phys.nu_m);
  c.phys.s = f.number("physics", "s", c.phys.s);
  if (!(c.phys.nu > 0.0 && c.phys.nu_m > 0.0 && c.phys.s > 0.0))
    throw ConfigError("[physics] nu, nu_m and s must be positive");

  if (auto t = f.text("scheme", "theta")) {
    if (*t == "auto") {
      c.theta = -1.0;
    } else {
      c.theta = f.number("scheme", "theta", 0.0);
      if (!(c.theta >= 0.0 && c.theta <= 1.0)) throw ConfigError("[scheme] theta must be 'auto' or lie in [0, 1]");
    }
  }
  c.end_time = f.number("scheme", "t", c.end_time);
  c.members = f.integer("scheme", "j", c.members);
  if (c.members < 1) throw ConfigError("[scheme] J must be at least 1");

  if (auto e = f.text("mesh", "element")) {
    const std::string v = lower(*e);
    if (v == "sv") c.pair = ElementPair::scott_vogelius;
    else if (v == "th") c.pair = ElementPair::taylor_hood;
    else throw ConfigError("[mesh] element must be SV or TH");
  }

  c.epsilon = f.number("ensemble", "epsilon", c.epsilon);
  c.write_vtk = f.flag("output", "vtk", c.write_vtk);
  c.write_csv = f.flag("output", "csv", c.write_csv);
  c.write_step_log = f.flag("output", "step_log", c.write_step_log);

  switch (experiment) {
    case Experiment::mms_temporal: {
      c.grid = f.integer("mesh", "n", c.grid);
      c.step_levels = f.integers("scheme", "steps", c.step_levels);
      if (c.grid < 1) throw ConfigError("[mesh] n must be positive");
      if (c.step_levels.size() < 3) throw ConfigError("[scheme] steps needs at least 3 levels");
      for (std::size_t k = 0; k < c.step_levels.size(); ++k) {
        if (c.step_levels[k] < 2) throw ConfigError("[scheme] every step count must be at least 2");
        if (k > 0 && c.step_levels[k] != 2 * c.step_levels[k - 1])
          throw ConfigError("[scheme] step counts must double from level to level");
      }
      c.dt = c.end_time / c.step_levels.back();
      break;
    }
    case Experiment::mms_spatial: {
      c.grids = f.integers("mesh", "levels", c.grids);
      c.steps = f.integer("scheme", "steps", c.steps);
      if (c.grids.size() < 3) throw ConfigError("[mesh] levels needs at least 3 grids");
      for (std::size_t k = 0; k < c.grids.size(); ++k) {
        if (c.grids[k] < 1) throw ConfigError("[mesh] levels must be positive");
        if (k > 0 && c.grids[k] != 2 * c.grids[k - 1]) throw ConfigError("[mesh] levels must double");
      }
      if (c.steps < 2) throw ConfigError("[scheme] steps must be at least 2");
      c.dt = c.end_time / c.steps;
      break;
    }
    case Experiment::channel_step: {
      c.dt = f.number("scheme", "dt", c.dt);
      c.target_h = f.number("mesh", "target_h", c.target_h);
      if (!(c.target_h > 0.0 && c.target_h <= 1.0)) throw ConfigError("[mesh] target_h must lie in (0, 1]");
      c.epsilons = f.numbers("ensemble", "epsilons", c.epsilons);
      if (c.epsilons.empty()) throw ConfigError("[ensemble] epsilons must not be empty");
      for (double e : c.epsilons)
        if (!(e > 0.0 && e < 0.5)) throw ConfigError("[ensemble] epsilons must lie in (0, 0.5)");
      if (c.pair != ElementPair::scott_vogelius) throw ConfigError("[mesh] the channel demo requires element = SV");
      break;
    }
    case Experiment::bench: {
      c.grid = f.integer("mesh", "n", c.grid);
      c.dt = f.number("scheme", "dt", c.dt);
      c.bench_members = f.integers("bench", "members", c.bench_members);
      if (c.grid < 1) throw ConfigError("[mesh] n must be positive");
      if (c.bench_members.empty()) throw ConfigError("[bench] members must not be empty");
      for (int j : c.bench_members)
        if (j < 1 || j > 4) throw ConfigError("[bench] members must lie in 1..4");
      break;
    }
  }
  if (experiment == Experiment::mms_temporal || experiment == Experiment::mms_spatial) {
    if (c.members > 4) throw ConfigError("[scheme] the MMS perturbations support J <= 4");
    if (!(std::abs(c.epsilon) < 0.5)) throw ConfigError("[ensemble] epsilon must satisfy |epsilon| < 0.5");
  }
  f.reject_unused();

  // Scheme checks: theta admissibility and an integer number of steps.
  const int members = experiment == Experiment::bench ? 1 : c.members;
  make_scheme_params(c.phys, c.theta, c.dt, c.end_time, members);
  if (experiment == Experiment::mms_temporal)
    for (int m : c.step_levels) make_scheme_params(c.phys, c.theta, c.end_time / m, c.end_time, members);
  return c;
}

}  // namespace ensmhd
