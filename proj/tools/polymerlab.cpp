#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "polymer/harness.hpp"

namespace {

enum Exit { ok = 0, checks_failed = 1, usage = 2, unknown = 3, bad_config = 4, unwritable = 5, runtime = 6 };

void list_experiments() {
  for (const auto& e : polymer::experiments()) {
    std::cout << e.name << "  " << e.description << "\n  parameters: " << e.defaults.dump()
              << "\n  checks: " << e.check_defaults.dump() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polymerlab: directed polymer experiments"};
  std::string experiment, config_path, out_dir;
  std::uint64_t seed = 0;
  long replicas = 0;
  unsigned threads = 1;
  bool list = false;
  app.add_option("experiment", experiment, "experiment name");
  app.add_option("--config", config_path, "JSON config file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* rep_opt = app.add_option("--replicas", replicas, "replica count (pool size for population runs)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* thr_opt = app.add_option("--threads", threads, "worker threads, 0 = hardware concurrency");
  app.add_flag("--list", list, "list experiments and their defaults");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }
  if (list) {
    list_experiments();
    return ok;
  }
  if (experiment.empty() || config_path.empty()) {
    std::cerr << "usage: polymerlab <experiment> --config <file> [--seed N] [--replicas N] [--out DIR]\n";
    return usage;
  }

  try {
    auto cfg = polymer::load_config(config_path);
    if (!cfg.experiment.empty() && cfg.experiment != experiment) {
      throw polymer::ConfigError("config is for '" + cfg.experiment + "', not '" + experiment + "'");
    }
    cfg.experiment = experiment;
    if (*seed_opt) cfg.seed = seed;
    if (*rep_opt) cfg.replicas = replicas;
    if (*thr_opt) cfg.threads = threads;
    if (*out_opt) cfg.out_dir = out_dir;
    const auto report = polymer::run_experiment(cfg);
    polymer::write_report(report, cfg.out_dir);
    for (const auto& c : report.checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << c.value << " threshold=" << c.threshold;
      if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
      std::cout << "\n";
    }
    std::cout << report.rows.size() << " rows -> " << cfg.out_dir << "/" << report.experiment << ".csv\n";
    return report.all_passed() ? ok : checks_failed;
  } catch (const polymer::UnknownExperiment& e) {
    std::cerr << "error: " << e.what() << "\n";
    return unknown;
  } catch (const polymer::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bad_config;
  } catch (const polymer::OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return unwritable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return runtime;
  }
}
