#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavefill/corruption.hpp"
#include "wavefill/grid.hpp"
#include "wavefill/solver.hpp"
#include "wavefill/trajectory.hpp"

namespace wavefill {

struct MetricPair {
  double rmse_kmh = 0.0;
  double mae_kmh = 0.0;
  std::int64_t n_cells = 0;

  bool operator==(const MetricPair&) const = default;
};

/// RMSE and MAE over the cells where `truth` is OBSERVED. Both matrices must
/// share a grid.
MetricPair compute_metrics(const StateMatrix& estimate, const StateMatrix& truth);

/// splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

enum class SeedStream : std::uint64_t { Sampling = 1, Corruption = 2 };

/// Per-repetition seed: splitmix64(splitmix64(master ^ (stream << 32)) + rep).
/// Depends only on (master, stream, repetition), so every scenario of a sweep
/// sees the same vehicle sample at a given repetition.
constexpr std::uint64_t derive_seed(std::uint64_t master, SeedStream stream, std::uint64_t repetition) {
  return splitmix64(splitmix64(master ^ (static_cast<std::uint64_t>(stream) << 32)) + repetition);
}

/// Where estimates are scored: on the rectangular grid with the same
/// resolution (oblique estimates are rasterized first), or on the
/// estimation grid itself.
enum class EvalGeometry { Rectangular, Native };

const char* to_string(EvalGeometry geometry);
EvalGeometry parse_eval_geometry(const std::string& text);

struct Scenario {
  std::string label;
  GridSpec grid;
  SolverConfig solver;
  double penetration = 1.0;
  /// Counts and thresholds; the seed is replaced per repetition.
  CorruptionPlan corruption;
};

struct RepetitionRecord {
  int repetition = 0;
  std::uint64_t sample_seed = 0;
  std::uint64_t corruption_seed = 0;
  MetricPair metrics;
  std::optional<DetectionScore> detection;
  int iterations = 0;
  bool converged = false;
  double wall_time_s = 0.0;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
};

Summary summarize(const std::vector<double>& values);

struct ScenarioReport {
  Scenario scenario;
  std::vector<RepetitionRecord> repetitions;
  Summary rmse;
  Summary mae;
  Summary wall_time;
  std::optional<Summary> recall;
  std::optional<Summary> precision;
  std::optional<Summary> sign_agreement;
};

struct ExperimentReport {
  std::string mode;
  std::uint64_t master_seed = 0;
  int repetitions = 0;
  EvalGeometry geometry = EvalGeometry::Rectangular;
  std::vector<ScenarioReport> scenarios;
};

struct HarnessOptions {
  EvalGeometry geometry = EvalGeometry::Rectangular;
  int threads = 1;
  double detect_threshold_kmh = 10.0;
};

/// Runs one repetition: sample vehicles, bin, optionally corrupt, solve,
/// score. Deterministic in (trajectories, scenario, seeds, options).
RepetitionRecord run_repetition(const TrajectorySet& trajectories, const Scenario& scenario, int repetition,
                                std::uint64_t sample_seed, std::uint64_t corruption_seed,
                                const HarnessOptions& options = {});

/// Runs every scenario for `reps` repetitions with seeds derived from
/// `master_seed`. Repetitions may run concurrently; results are ordered by
/// (scenario, repetition).
ExperimentReport run_scenarios(const TrajectorySet& trajectories, std::vector<Scenario> scenarios, int reps,
                               std::uint64_t master_seed, const HarnessOptions& options = {},
                               std::string mode = "custom");

std::string grid_label(const GridSpec& grid);

ExperimentReport run_tse_sweep(const TrajectorySet& trajectories, const std::vector<GridSpec>& grids,
                               const SolverConfig& cfg, const std::vector<double>& rates, int reps,
                               std::uint64_t master_seed, const HarnessOptions& options = {});

/// `levels` are per-type counts; each level injects that many type I and
/// type II corruptions.
ExperimentReport run_rtse_sweep(const TrajectorySet& trajectories, const GridSpec& grid, const SolverConfig& cfg,
                                double rate, const std::vector<int>& levels, int reps, std::uint64_t master_seed,
                                const HarnessOptions& options = {}, const CorruptionPlan& thresholds = {});

ExperimentReport run_wave_sensitivity(const TrajectorySet& trajectories, const GridSpec& base_grid,
                                      const SolverConfig& cfg, const std::vector<double>& wave_speeds_kmh,
                                      double rate, int reps, std::uint64_t master_seed,
                                      const HarnessOptions& options = {});

/// Full model, rectangular grid, convex nuclear norm, and no sparse term,
/// all on the corrupted scenario (default 10% penetration, 30 + 30).
ExperimentReport run_ablations(const TrajectorySet& trajectories, const GridSpec& grid, const SolverConfig& cfg,
                               int reps, std::uint64_t master_seed, const HarnessOptions& options = {},
                               double rate = 0.10, int corruption_count = 30,
                               const CorruptionPlan& thresholds = {});

}  // namespace wavefill
