#pragma once

#include "ensmhd/params.hpp"
#include "ensmhd/scheme.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ensmhd {

/// Sectioned "key = value" file. Blank lines and lines starting with '#' or
/// ';' are ignored; keys before the first [section] belong to section "".
/// Every lookup marks the key as used so unknown keys can be reported.
class ConfigFile {
public:
  /// Throws ConfigError("<source>:<line>: ...") on malformed input.
  static ConfigFile parse(std::istream& in, const std::string& source = "<config>");
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;

  std::optional<std::string> text(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  int integer(const std::string& section, const std::string& key, int fallback) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              const std::vector<double>& fallback) const;
  std::vector<int> integers(const std::string& section, const std::string& key,
                            const std::vector<int>& fallback) const;

  /// ConfigError naming the first key never looked up.
  void reject_unused() const;

private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const Entry& e, const std::string& section, const std::string& key,
                         const std::string& what) const;

  std::string source_;
  std::map<std::pair<std::string, std::string>, Entry> entries_;
  mutable std::set<std::pair<std::string, std::string>> used_;
};

enum class Experiment { mms_temporal, mms_spatial, channel_step, bench };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

struct RunConfig {
  Experiment experiment = Experiment::mms_temporal;
  PhysicalParams phys;
  /// Negative: select automatically.
  double theta = -1.0;
  double dt = 0.0;
  double end_time = 0.0;
  int members = 4;
  ElementPair pair = ElementPair::taylor_hood;
  // unit-square studies
  int grid = 16;
  std::vector<int> grids;
  std::vector<int> step_levels;
  int steps = 0;
  // channel
  double target_h = 0.85;
  std::vector<double> epsilons;
  double epsilon = 0.01;
  // bench
  std::vector<int> bench_members;
  int bench_steps = 3;
  // exports
  bool write_vtk = true;
  bool write_csv = true;
  bool write_step_log = true;

  /// theta after automatic selection.
  double resolved_theta() const;
};

/// Defaults for an experiment before any file is read.
RunConfig default_config(Experiment experiment);

/// Defaults overridden by the file; every value is validated, so a config
/// that loads is runnable. ConfigError on any problem.
RunConfig read_run_config(const ConfigFile& file, Experiment experiment);

}  // namespace ensmhd
