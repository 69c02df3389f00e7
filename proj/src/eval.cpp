#include "wavefill/eval.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "wavefill/error.hpp"
#include "wavefill/io.hpp"

namespace wavefill {

MetricPair compute_metrics(const StateMatrix& estimate, const StateMatrix& truth) {
  if (!(estimate.grid == truth.grid) || estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    fail(ErrorKind::Parameter, "estimate and truth are on different grids");
  }
  double sq = 0.0;
  double abs_sum = 0.0;
  std::int64_t n = 0;
  for (Eigen::Index c = 0; c < truth.cols(); ++c) {
    for (Eigen::Index r = 0; r < truth.rows(); ++r) {
      if (truth.mask(r, c) != CellState::Observed) continue;
      const double err = truth.values(r, c) - estimate.values(r, c);
      if (!std::isfinite(err)) {
        fail(ErrorKind::Numerical, "estimate has no value at evaluated cell (" + std::to_string(r) + ", " +
                                       std::to_string(c) + ")");
      }
      sq += err * err;
      abs_sum += std::abs(err);
      ++n;
    }
  }
  if (n == 0) fail(ErrorKind::EmptyObservation, "evaluation set is empty");
  return {std::sqrt(sq / static_cast<double>(n)), abs_sum / static_cast<double>(n), n};
}

const char* to_string(EvalGeometry geometry) {
  return geometry == EvalGeometry::Rectangular ? "rectangular" : "native";
}

EvalGeometry parse_eval_geometry(const std::string& text) {
  if (text == "rectangular") return EvalGeometry::Rectangular;
  if (text == "native") return EvalGeometry::Native;
  fail(ErrorKind::Parameter, "unknown evaluation geometry '" + text + "' (expected rectangular or native)");
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

RepetitionRecord run_repetition(const TrajectorySet& trajectories, const Scenario& scenario, int repetition,
                                std::uint64_t sample_seed, std::uint64_t corruption_seed,
                                const HarnessOptions& options) {
  RepetitionRecord rec;
  rec.repetition = repetition;
  rec.sample_seed = sample_seed;
  rec.corruption_seed = corruption_seed;

  const auto sampled = sample_penetration(trajectories, scenario.penetration, sample_seed);
  auto matrix = build_matrix(sampled, scenario.grid);
  std::vector<CorruptionRecord> records;
  const bool corrupt = scenario.corruption.count_type1 > 0 || scenario.corruption.count_type2 > 0;
  if (corrupt) {
    auto plan = scenario.corruption;
    plan.seed = corruption_seed;
    auto injected = inject(matrix, plan);
    matrix = std::move(injected.matrix);
    records = std::move(injected.records);
  }

  const auto result = solve(matrix, scenario.solver);
  rec.iterations = result.iterations;
  rec.converged = result.converged;
  rec.wall_time_s = result.wall_time_s;
  if (corrupt) rec.detection = score_detection(result.sparse, records, options.detect_threshold_kmh);

  auto estimate = estimate_matrix(matrix, result.low_rank);
  if (options.geometry == EvalGeometry::Rectangular) {
    const auto target = scenario.grid.rectangular();
    if (scenario.grid.oblique()) estimate = rasterize(estimate, target);
    rec.metrics = compute_metrics(estimate, ground_truth_matrix(trajectories, target));
  } else {
    rec.metrics = compute_metrics(estimate, ground_truth_matrix(trajectories, scenario.grid));
  }
  return rec;
}

ExperimentReport run_scenarios(const TrajectorySet& trajectories, std::vector<Scenario> scenarios, int reps,
                               std::uint64_t master_seed, const HarnessOptions& options, std::string mode) {
  if (reps < 1) fail(ErrorKind::Parameter, "repetition count must be >= 1");
  for (const auto& s : scenarios) {
    s.grid.validate();
    s.solver.validate();
    s.corruption.validate();
  }

  const std::size_t per = static_cast<std::size_t>(reps);
  const std::size_t total = scenarios.size() * per;
  std::vector<RepetitionRecord> records(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const auto& scenario = scenarios[task / per];
      const auto rep = static_cast<int>(task % per);
      const auto sample_seed = derive_seed(master_seed, SeedStream::Sampling, static_cast<std::uint64_t>(rep));
      const auto corruption_seed = derive_seed(master_seed, SeedStream::Corruption, static_cast<std::uint64_t>(rep));
      try {
        records[task] = run_repetition(trajectories, scenario, rep, sample_seed, corruption_seed, options);
      } catch (...) {
        errors[task] = std::current_exception();
      }
    }
  };
  const auto thread_count = static_cast<std::size_t>(std::max(1, options.threads));
  if (thread_count == 1 || total <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < std::min(thread_count, total); ++i) pool.emplace_back(worker);
  }

  for (std::size_t task = 0; task < total; ++task) {
    if (!errors[task]) continue;
    const auto& scenario = scenarios[task / per];
    const auto rep = task % per;
    const auto tag = "scenario '" + scenario.label + "' repetition " + std::to_string(rep) + " (sample seed " +
                     std::to_string(derive_seed(master_seed, SeedStream::Sampling, rep)) + ", corruption seed " +
                     std::to_string(derive_seed(master_seed, SeedStream::Corruption, rep)) + "): ";
    try {
      std::rethrow_exception(errors[task]);
    } catch (const Error& e) {
      throw Error(e.kind(), tag + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::Numerical, tag + e.what());
    }
  }

  ExperimentReport report;
  report.mode = std::move(mode);
  report.master_seed = master_seed;
  report.repetitions = reps;
  report.geometry = options.geometry;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    ScenarioReport sr;
    sr.scenario = std::move(scenarios[i]);
    sr.repetitions.assign(records.begin() + static_cast<std::ptrdiff_t>(i * per),
                          records.begin() + static_cast<std::ptrdiff_t>((i + 1) * per));
    std::vector<double> rmse, mae, time, recall, precision, sign;
    for (const auto& r : sr.repetitions) {
      rmse.push_back(r.metrics.rmse_kmh);
      mae.push_back(r.metrics.mae_kmh);
      time.push_back(r.wall_time_s);
      if (r.detection) {
        recall.push_back(r.detection->recall);
        precision.push_back(r.detection->precision);
        sign.push_back(r.detection->sign_agreement);
      }
    }
    sr.rmse = summarize(rmse);
    sr.mae = summarize(mae);
    sr.wall_time = summarize(time);
    if (!recall.empty()) {
      sr.recall = summarize(recall);
      sr.precision = summarize(precision);
      sr.sign_agreement = summarize(sign);
    }
    report.scenarios.push_back(std::move(sr));
  }
  return report;
}

std::string grid_label(const GridSpec& grid) {
  if (!grid.oblique()) return "rectangular";
  std::ostringstream ss;
  ss << "oblique(" << *grid.wave_speed_kmh << " km/h)";
  return ss.str();
}

namespace {

std::string rate_label(double rate) {
  std::ostringstream ss;
  ss << "CV-" << rate * 100.0 << "%";
  return ss.str();
}

}  // namespace

ExperimentReport run_tse_sweep(const TrajectorySet& trajectories, const std::vector<GridSpec>& grids,
                               const SolverConfig& cfg, const std::vector<double>& rates, int reps,
                               std::uint64_t master_seed, const HarnessOptions& options) {
  std::vector<Scenario> scenarios;
  for (const auto& grid : grids) {
    for (double rate : rates) {
      scenarios.push_back({grid_label(grid) + " " + rate_label(rate), grid, cfg, rate, {}});
    }
  }
  return run_scenarios(trajectories, std::move(scenarios), reps, master_seed, options, "tse");
}

ExperimentReport run_rtse_sweep(const TrajectorySet& trajectories, const GridSpec& grid, const SolverConfig& cfg,
                                double rate, const std::vector<int>& levels, int reps, std::uint64_t master_seed,
                                const HarnessOptions& options, const CorruptionPlan& thresholds) {
  std::vector<Scenario> scenarios;
  for (int level : levels) {
    CorruptionPlan plan = thresholds;
    plan.count_type1 = level;
    plan.count_type2 = level;
    scenarios.push_back({grid_label(grid) + " " + rate_label(rate) + " corruption " + std::to_string(level) + "+" +
                             std::to_string(level),
                         grid, cfg, rate, plan});
  }
  return run_scenarios(trajectories, std::move(scenarios), reps, master_seed, options, "rtse");
}

ExperimentReport run_wave_sensitivity(const TrajectorySet& trajectories, const GridSpec& base_grid,
                                      const SolverConfig& cfg, const std::vector<double>& wave_speeds_kmh,
                                      double rate, int reps, std::uint64_t master_seed,
                                      const HarnessOptions& options) {
  std::vector<Scenario> scenarios;
  for (double v : wave_speeds_kmh) {
    GridSpec grid = base_grid;
    grid.wave_speed_kmh = v;
    scenarios.push_back({grid_label(grid) + " " + rate_label(rate), grid, cfg, rate, {}});
  }
  return run_scenarios(trajectories, std::move(scenarios), reps, master_seed, options, "sensitivity");
}

ExperimentReport run_ablations(const TrajectorySet& trajectories, const GridSpec& grid, const SolverConfig& cfg,
                               int reps, std::uint64_t master_seed, const HarnessOptions& options, double rate,
                               int corruption_count, const CorruptionPlan& thresholds) {
  CorruptionPlan plan = thresholds;
  plan.count_type1 = corruption_count;
  plan.count_type2 = corruption_count;

  SolverConfig convex = cfg;
  convex.rank_surrogate = RankSurrogate::ConvexNuclear;
  SolverConfig no_sparse = cfg;
  no_sparse.sparse_term_enabled = false;

  std::vector<Scenario> scenarios{
      {"full model", grid, cfg, rate, plan},
      {"w/o wave grid", grid.rectangular(), cfg, rate, plan},
      {"w/o nonconvex", grid, convex, rate, plan},
      {"w/o sparse term", grid, no_sparse, rate, plan},
  };
  return run_scenarios(trajectories, std::move(scenarios), reps, master_seed, options, "ablation");
}

}  // namespace wavefill
