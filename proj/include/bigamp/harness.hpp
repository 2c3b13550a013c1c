#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bigamp/engine.hpp"
#include "bigamp/metrics.hpp"
#include "bigamp/theory.hpp"
#include "bigamp/types.hpp"

namespace bga {

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

enum class RunMode { Simulate, Sweep, Theory, Compare };

RunMode run_mode_from_string(const std::string& s);

struct ExperimentSpec {
  SystemConfig base;
  std::vector<SweepAxis> axes;  // config order; empty for simulate
  int n_trials = 1;
  std::uint64_t base_seed = 0;
  RunMode mode = RunMode::Sweep;
  BigampConfig algo;
};

/// Parses the JSON experiment file. Unknown keys are an error.
ExperimentSpec load_experiment_spec(const std::string& path);
ExperimentSpec parse_experiment_spec(const std::string& text);

/// One point of the sweep grid: the axis values in config order and the
/// fully substituted scenario configuration.
struct SweepPoint {
  std::vector<std::pair<std::string, double>> params;
  SystemConfig cfg;
};

std::vector<SweepPoint> enumerate_points(const ExperimentSpec& spec);

/// Stable 64-bit hash of the axis values of one point.
std::uint64_t point_hash(const SweepPoint& pt);

/// Seed of one trial: independent of every other (point, trial) pair.
std::uint64_t trial_seed(std::uint64_t base_seed, const SweepPoint& pt, int trial);

/// Per-point closed-form predictions; fields absent where the signal prior
/// has no codebook interpretation or the recursion found no fixed point.
struct TheoryPoint {
  bool fixed_point = false;
  double tau_star = 0.0;
  double vr_star = 0.0;
  double vq_star = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  bool L_ok = false;
  bool M_ok = false;
  std::optional<double> dad_error;
  std::optional<double> mse_limit;
  std::optional<double> ser_bound_value;
  SeTrace trace;
};

TheoryPoint compute_theory(const SystemConfig& cfg);

Priors priors_from_config(const SystemConfig& cfg, double sigma2);

/// One seeded end-to-end Monte Carlo trial. With timing disabled,
/// runtime_ms is reported as 0 so output files are bit-reproducible.
TrialRecord run_trial(const SystemConfig& cfg, const BigampConfig& algo,
                      std::uint64_t seed, bool timing = true);

/// Support-aware linear MMSE reference: channel estimate given the true
/// activity set and transmit matrix, then symbol re-estimate given the true
/// channels. beta holds the per-device prior channel powers (length N).
/// Lower-bounds what the iterative algorithm can reach.
TrialRecord genie_mmse_baseline(const Scenario& sc, int pilot_len, const VecD& beta);

struct SweepOptions {
  int workers = 0;  // 0: hardware concurrency
  bool resume = false;
  bool timing = true;
};

/// Runs the full grid x trials, writing CSV rows in canonical order as they
/// complete. Returns the number of rows written (excluding skipped ones).
int run_sweep(const ExperimentSpec& spec, const std::string& out_path,
              const SweepOptions& opts);

/// Recursion traces and predictor values per sweep point, one CSV row per
/// recursion step.
int theory_command(const ExperimentSpec& spec, const std::string& out_path);

/// 17-significant-digit float formatting shared by all CSV output.
std::string format_double(double v);

}  // namespace bga
