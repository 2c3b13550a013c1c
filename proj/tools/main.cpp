#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bigamp/harness.hpp"

namespace {

int default_workers() {
  if (const char* env = std::getenv("BIGAMP_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring invalid BIGAMP_WORKERS value\n";
  }
  return 0;  // resolved to hardware concurrency downstream
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BiGAMP grant-free access simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  int workers = default_workers();
  bool resume = false;
  bool no_timing = false;

  auto add_common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", config_path, "experiment config file (JSON)")
        ->required();
    auto* out = sub->add_option("--out", out_path, "output CSV path");
    if (out_required) out->required();
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run trials at one point");
  add_common(simulate, false);
  simulate->add_option("--seed", seed_override, "override the base seed");
  simulate->add_flag("--no-timing", no_timing,
                     "report runtime_ms as 0 for reproducible output");

  CLI::App* sweep = app.add_subcommand("sweep", "run the full parameter grid");
  add_common(sweep, true);
  sweep->add_option("--workers", workers, "worker thread count");
  sweep->add_flag("--resume", resume, "skip rows already present in the output");
  sweep->add_flag("--no-timing", no_timing,
                  "report runtime_ms as 0 for reproducible output");

  CLI::App* theory = app.add_subcommand("theory", "closed-form predictions only");
  add_common(theory, true);

  CLI::App* compare = app.add_subcommand("compare",
                                         "simulation with prediction columns");
  add_common(compare, true);
  compare->add_option("--workers", workers, "worker thread count");
  compare->add_flag("--resume", resume, "skip rows already present in the output");
  compare->add_flag("--no-timing", no_timing,
                    "report runtime_ms as 0 for reproducible output");

  CLI11_PARSE(app, argc, argv);
  has_seed = simulate->count("--seed") > 0;

  try {
    bga::ExperimentSpec spec = bga::load_experiment_spec(config_path);
    if (has_seed) spec.base_seed = seed_override;

    bga::SweepOptions opts;
    opts.workers = workers;
    opts.resume = resume;
    opts.timing = !no_timing;

    if (simulate->parsed()) {
      spec.axes.clear();  // one point: the base configuration
      const std::string path = out_path.empty() ? "results.csv" : out_path;
      const int rows = bga::run_sweep(spec, path, opts);
      std::cout << "wrote " << rows << " rows to " << path << "\n";
    } else if (theory->parsed()) {
      const int rows = bga::theory_command(spec, out_path);
      std::cout << "wrote " << rows << " rows to " << out_path << "\n";
    } else {
      // sweep and compare are the same pipeline: predictions are always
      // joined onto simulation rows
      const int rows = bga::run_sweep(spec, out_path, opts);
      std::cout << "wrote " << rows << " rows to " << out_path << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
