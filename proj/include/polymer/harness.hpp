#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace polymer {

using json = nlohmann::json;

class UnknownExperiment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed config, unknown or mistyped parameter, or a parameter the model rejects.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  json parameters = json::object();
  json checks = json::object();  // tolerance / expectation overrides
  std::uint64_t seed = 0;
  long replicas = -1;            // -1: experiment default
  unsigned threads = 1;          // 0: one per hardware thread
  std::string out_dir = ".";
};

/// Parses the JSON config text. Top-level keys: experiment, seed, replicas, threads,
/// parameters, checks, out.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

using Cell = std::variant<double, long long, std::string>;

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Report {
  std::string experiment;
  json parameters;  // resolved, defaults included
  json check_settings;
  std::uint64_t seed = 0;
  long replicas = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  json statistics = json::object();
  std::vector<Check> checks;

  bool all_passed() const;
  json summary() const;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  long default_replicas = 1;
  json defaults;
  json check_defaults;
  std::vector<std::string> columns;
};

std::vector<ExperimentInfo> experiments();

/// Pure function of the config: same config, same rows, in replica order.
Report run_experiment(const ExperimentConfig& config);

/// Numbers as %.17g; strings verbatim.
void write_csv(const Report& r, std::ostream& os);

/// Writes <dir>/<experiment>.csv and <dir>/<experiment>.json.
void write_report(const Report& r, const std::string& dir);

}  // namespace polymer
