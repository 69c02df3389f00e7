#include "wavefill/commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <sstream>

#include "wavefill/error.hpp"
#include "wavefill/io.hpp"
#include "wavefill/matrix_io.hpp"
#include "wavefill/report.hpp"

namespace wavefill {

namespace fs = std::filesystem;

#ifndef WAVEFILL_VERSION
#define WAVEFILL_VERSION "dev"
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class ArtifactWriter {
 public:
  ArtifactWriter(const RunConfig& config, std::string command)
      : config_(config), command_(std::move(command)), start_(Clock::now()) {}

  fs::path path(const std::string& name) const { return config_.output_dir / name; }

  void text(const std::string& name, std::string_view content) {
    write_atomic(path(name), content);
    artifacts_.push_back(name);
  }

  void matrix(const std::string& stem, const StateMatrix& m) {
    save_state_matrix(path(stem), m);
    artifacts_.push_back(stem + ".csv");
    artifacts_.push_back(stem + ".json");
  }

  void heatmap(const std::string& name, const StateMatrix& m) {
    save_heatmap(path(name), m, config_.heatmap_vmax_kmh);
    artifacts_.push_back(name);
  }

  // manifest.json: everything needed to replay the run, and nothing that
  // changes between identical runs. Wall time goes to timing.json.
  void finish(json seeds, json extra = json::object(), json timing = json::object()) {
    timing["total_wall_time_s"] = seconds_since(start_);
    write_atomic(path("timing.json"), dump(timing));
    artifacts_.push_back("timing.json");

    json manifest = {{"tool", "wavefill"},
                     {"version", WAVEFILL_VERSION},
                     {"command", command_},
                     {"config", config_to_json(config_)},
                     {"seeds", std::move(seeds)},
                     {"artifacts", artifacts_}};
    for (auto& [key, value] : extra.items()) manifest[key] = value;
    write_atomic(path("manifest.json"), dump(manifest));
  }

 private:
  const RunConfig& config_;
  std::string command_;
  Clock::time_point start_;
  std::vector<std::string> artifacts_;
};

std::uint64_t sample_seed(const RunConfig& c) { return derive_seed(c.seed, SeedStream::Sampling, 0); }
std::uint64_t corruption_seed(const RunConfig& c) { return derive_seed(c.seed, SeedStream::Corruption, 0); }

json load_stats_json(const LoadResult& r) {
  return {{"rows_read", r.rows_read},
          {"rows_filtered", r.rows_filtered},
          {"rows_out_of_domain", r.rows_out_of_domain},
          {"rows_duplicate", r.rows_duplicate},
          {"vehicles", r.trajectories.vehicle_count()},
          {"points", r.trajectories.point_count()}};
}

struct LoadedDataset {
  TrajectorySet trajectories;
  json stats;
};

LoadedDataset load_with_stats(const RunConfig& c) {
  const double S = c.grid.segment_length_m;
  const double W = c.grid.window_length_s;
  if (const auto* file = std::get_if<TrajectoryFileSource>(&c.dataset)) {
    auto result = load_trajectories(file->path, file->format, S, W);
    auto stats = load_stats_json(result);
    return {std::move(result.trajectories), std::move(stats)};
  }
  if (const auto* syn = std::get_if<SyntheticSource>(&c.dataset)) {
    auto data = generate_synthetic(syn->field, S, W, syn->vehicle_count, syn->entry_headway_s);
    json stats = {{"vehicles", data.trajectories.vehicle_count()}, {"points", data.trajectories.point_count()}};
    return {std::move(data.trajectories), std::move(stats)};
  }
  fail(ErrorKind::Config, "dataset: this command needs trajectories, not a matrix");
}

json metrics_json(const MetricPair& m) { return to_json(m); }

}  // namespace

TrajectorySet load_dataset(const RunConfig& config) { return load_with_stats(config).trajectories; }

void cmd_build_grid(const RunConfig& config, std::ostream& log) {
  ArtifactWriter out(config, "build-grid");
  auto data = load_with_stats(config);
  const auto m = build_matrix(data.trajectories, config.grid);
  out.matrix("matrix", m);
  out.heatmap("matrix.pgm", m);
  log << "matrix " << m.rows() << "x" << m.cols() << ", " << m.observed_count() << " observed cells ("
      << grid_label(config.grid) << ")\n";
  out.finish(json::object(), {{"dataset", data.stats}});
}

void cmd_estimate(const RunConfig& config, std::ostream& log) {
  ArtifactWriter out(config, "estimate");
  json seeds = json::object();
  json extra = json::object();

  StateMatrix input;
  std::optional<TrajectorySet> full;
  if (const auto* src = std::get_if<MatrixFileSource>(&config.dataset)) {
    input = load_state_matrix(src->stem);
    if (!(input.grid == config.grid)) fail(ErrorKind::Config, "grid: does not match the grid stored with dataset.matrix");
    if (config.estimate.penetration < 1.0) {
      fail(ErrorKind::Config, "estimate.penetration: a matrix input cannot be subsampled by vehicle");
    }
  } else {
    auto data = load_with_stats(config);
    extra["dataset"] = data.stats;
    seeds["sampling"] = sample_seed(config);
    const auto sampled = sample_penetration(data.trajectories, config.estimate.penetration, sample_seed(config));
    input = build_matrix(sampled, config.grid);
    full = std::move(data.trajectories);
  }

  std::vector<CorruptionRecord> records;
  const auto& plan_cfg = config.estimate.corruption;
  if (plan_cfg.count_type1 > 0 || plan_cfg.count_type2 > 0) {
    auto plan = plan_cfg;
    plan.seed = corruption_seed(config);
    seeds["corruption"] = plan.seed;
    auto injected = inject(input, plan);
    input = std::move(injected.matrix);
    records = std::move(injected.records);
    std::ostringstream csv;
    write_corruption_records(csv, records);
    out.text("corruption.csv", csv.str());
  }

  const auto result = solve(input, config.solver);
  const auto estimate = estimate_matrix(input, result.low_rank);
  const auto sparse = estimate_matrix(input, result.sparse);
  out.matrix("input", input);
  out.matrix("estimate", estimate);
  out.matrix("sparse", sparse);
  out.heatmap("input.pgm", input);
  out.heatmap("estimate.pgm", estimate);
  if (config.grid.oblique()) {
    const auto rect = rasterize(estimate, config.grid.rectangular());
    out.matrix("estimate_rect", rect);
    out.heatmap("estimate_rect.pgm", rect);
  }

  json convergence = {{"iterations", result.iterations},
                      {"converged", result.converged},
                      {"kept_rank", config.solver.kept_rank(input.rows(), input.cols())},
                      {"residual_trace", result.residual_trace},
                      {"observed_cells", input.observed_count()},
                      {"seeds", seeds}};
  if (!records.empty()) {
    convergence["detection"] = to_json(score_detection(result.sparse, records, config.experiment.detect_threshold_kmh));
  }
  if (full) {
    const bool rect = config.experiment.evaluation == EvalGeometry::Rectangular;
    const auto target = rect ? config.grid.rectangular() : config.grid;
    const auto scored = rect && config.grid.oblique() ? rasterize(estimate, target) : estimate;
    const auto metrics = compute_metrics(scored, ground_truth_matrix(*full, target));
    convergence["metrics"] = metrics_json(metrics);
    convergence["evaluation_geometry"] = to_string(config.experiment.evaluation);
    log << "rmse " << format_fixed(metrics.rmse_kmh, 3) << " km/h, mae " << format_fixed(metrics.mae_kmh, 3)
        << " km/h over " << metrics.n_cells << " cells\n";
  }
  out.text("convergence.json", dump(convergence));
  log << "solved " << input.rows() << "x" << input.cols() << " in " << result.iterations << " iterations"
      << (result.converged ? "" : " (not converged)") << "\n";
  out.finish(seeds, extra, {{"solver_wall_time_s", result.wall_time_s}});
}

void cmd_experiment(const RunConfig& config, std::ostream& log) {
  ArtifactWriter out(config, "experiment");
  auto data = load_with_stats(config);
  const auto& e = config.experiment;
  HarnessOptions opts;
  opts.geometry = e.evaluation;
  opts.threads = config.threads;
  opts.detect_threshold_kmh = e.detect_threshold_kmh;

  ExperimentReport report;
  switch (e.mode) {
    case ExperimentMode::Tse: {
      std::vector<GridSpec> grids{config.grid};
      if (e.include_rectangular && config.grid.oblique()) grids.push_back(config.grid.rectangular());
      report = run_tse_sweep(data.trajectories, grids, config.solver, e.rates, e.reps, config.seed, opts);
      break;
    }
    case ExperimentMode::Rtse:
      report = run_rtse_sweep(data.trajectories, config.grid, config.solver, e.penetration, e.corruption_levels,
                              e.reps, config.seed, opts, e.corruption);
      break;
    case ExperimentMode::Sensitivity:
      report = run_wave_sensitivity(data.trajectories, config.grid, config.solver, e.wave_speeds_kmh, e.penetration,
                                    e.reps, config.seed, opts);
      break;
    case ExperimentMode::Ablation:
      report = run_ablations(data.trajectories, config.grid, config.solver, e.reps, config.seed, opts, e.penetration,
                             e.ablation_corruption_count, e.corruption);
      break;
  }

  out.text("report.csv", report_csv(report));
  out.text("report.json", dump(report_json(report)));
  for (const auto& sr : report.scenarios) {
    log << sr.scenario.label << ": rmse " << format_fixed(sr.rmse.mean, 3) << " +/- " << format_fixed(sr.rmse.std, 3)
        << " km/h\n";
  }
  json seeds = {{"master", config.seed}};
  out.finish(seeds, {{"dataset", data.stats}}, timing_json(report));
}

void cmd_synth(const RunConfig& config, std::ostream& log) {
  const auto* syn = std::get_if<SyntheticSource>(&config.dataset);
  if (!syn) fail(ErrorKind::Config, "dataset: synth needs a dataset.synthetic block");
  ArtifactWriter out(config, "synth");
  const double S = config.grid.segment_length_m;
  const double W = config.grid.window_length_s;
  const auto data = generate_synthetic(syn->field, S, W, syn->vehicle_count, syn->entry_headway_s);

  std::ostringstream csv;
  write_trajectories(csv, data.trajectories);
  out.text("trajectories.csv", csv.str());
  json field = {{"field", to_json(syn->field)},
                {"segment_length_m", S},
                {"window_length_s", W},
                {"boundary_slope_s_per_m", data.field.boundary_slope_s_per_m()},
                {"vehicle_count", syn->vehicle_count},
                {"entry_headway_s", syn->entry_headway_s}};
  out.text("field.json", dump(field));
  const auto truth = ground_truth_matrix(data.trajectories, config.grid);
  out.matrix("truth", truth);
  out.heatmap("truth.pgm", truth);
  log << data.trajectories.vehicle_count() << " vehicles, " << data.trajectories.point_count() << " points; truth "
      << truth.rows() << "x" << truth.cols() << " with " << truth.observed_count() << " observed cells\n";
  out.finish({{"field", syn->field.seed}});
}

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON run configuration")->required();
  cmd->add_option("--out", flags.out, "Output directory (overrides output.dir)");
  cmd->add_option("--seed", flags.seed, "Master seed (overrides seed)");
  cmd->add_option("--threads", flags.threads, "Worker threads (overrides threads)")->check(CLI::PositiveNumber);
  cmd->add_option("--set", flags.overrides, "Override a config field: dotted.path=value (repeatable)");
}

RunConfig load_config(const CommonFlags& flags) {
  const fs::path path = flags.config;
  if (!fs::exists(path)) fail(ErrorKind::Config, "config file not found: " + path.string());
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) fail(ErrorKind::Config, "config file is not valid JSON: " + path.string());
  for (const auto& assignment : flags.overrides) apply_override(doc, assignment);
  if (flags.seed) doc["seed"] = *flags.seed;
  if (flags.threads) doc["threads"] = *flags.threads;
  auto config = parse_run_config(doc, fs::absolute(path).parent_path());
  if (!flags.out.empty()) config.output_dir = fs::absolute(flags.out).lexically_normal();
  return config;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traffic speed field reconstruction from sparse trajectories", "wavefill"};
  app.set_version_flag("--version", WAVEFILL_VERSION);
  app.require_subcommand(1);

  CommonFlags flags;
  struct Entry {
    const char* name;
    const char* help;
    void (*run)(const RunConfig&, std::ostream&);
  };
  const Entry entries[] = {
      {"build-grid", "Bin trajectories into a speed matrix", cmd_build_grid},
      {"estimate", "Complete one speed matrix", cmd_estimate},
      {"experiment", "Run a repeated evaluation sweep", cmd_experiment},
      {"synth", "Generate synthetic trajectories with ground truth", cmd_synth},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, flags);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg_out, msg_err;
    const int code = app.exit(e, msg_out, msg_err);
    out << msg_out.str();
    err << msg_err.str();
    return code == 0 ? 0 : 2;
  }

  try {
    const auto config = load_config(flags);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) entries[i].run(config, out);
    }
  } catch (const Error& e) {
    err << "wavefill: " << e.what() << "\n";
    return e.kind() == ErrorKind::Config ? 2 : 3;
  } catch (const std::exception& e) {
    err << "wavefill: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace wavefill
