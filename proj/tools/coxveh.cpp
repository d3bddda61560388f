// Experiment runner for the Cox vehicular-network toolkit: reads a config (or
// a built-in catalog entry), runs the simulation/quadrature job, writes CSVs
// plus a manifest.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coxveh/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"coxveh - Cox-process vehicular network experiments"};
  std::string config_path;
  std::string experiment;
  std::string out_dir = ".";
  std::int64_t seed = -1;
  int jobs = -1;
  bool list = false;
  app.add_option("--config", config_path, "experiment config file (INI-style)");
  app.add_option("--experiment", experiment, "built-in experiment name (see --list-experiments)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("--jobs", jobs, "worker threads (0 = all cores)");
  app.add_flag("--list-experiments", list, "print the experiment catalog and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    std::cout << coxveh::list_experiments();
    return 0;
  }
  if (config_path.empty() == experiment.empty()) {
    std::cerr << "exactly one of --config or --experiment is required\n";
    return 2;
  }

  try {
    coxveh::ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) {
        std::cerr << "cannot open config " << config_path << "\n";
        return 2;
      }
      cfg = coxveh::parse_experiment_config(is);
    } else {
      auto c = coxveh::catalog_config(experiment);
      if (!c) {
        std::cerr << "unknown experiment '" << experiment << "'\n";
        return 2;
      }
      cfg = *c;
    }
    if (seed >= 0) cfg.mc.seed = static_cast<std::uint64_t>(seed);
    if (jobs >= 0) cfg.mc.jobs = jobs;

    const auto result = coxveh::run_experiment(cfg, out_dir);
    for (const auto& f : result.files) std::cout << f << "\n";
    return 0;
  } catch (const coxveh::quadrature_error& e) {
    std::cerr << "quadrature failure: " << e.what() << " (estimate " << e.estimate
              << ", bound " << e.bound << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
