#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wavefill/eval.hpp"
#include "wavefill/serialize.hpp"
#include "wavefill/synthetic.hpp"
#include "wavefill/trajectory.hpp"

namespace wavefill {

struct TrajectoryFileSource {
  std::filesystem::path path;
  CsvFormat format;
};

struct SyntheticSource {
  SyntheticFieldSpec field;
  int vehicle_count = 2000;
  double entry_headway_s = 2.0;
};

struct MatrixFileSource {
  std::filesystem::path stem;  // <stem>.csv + <stem>.json
};

using DatasetSource = std::variant<TrajectoryFileSource, SyntheticSource, MatrixFileSource>;

enum class ExperimentMode { Tse, Rtse, Sensitivity, Ablation };

const char* to_string(ExperimentMode mode);

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::Tse;
  std::vector<double> rates{0.03, 0.05, 0.10, 0.15};
  /// rtse / sensitivity / ablation penetration.
  double penetration = 0.10;
  std::vector<int> corruption_levels{0, 10, 20, 30, 40, 50};
  int ablation_corruption_count = 30;
  /// Eligibility thresholds for injected corruption.
  CorruptionPlan corruption;
  std::vector<double> wave_speeds_kmh{-10, -12, -14, -16, -18, -20, -22, -24};
  /// tse mode: also run the rectangular grid next to an oblique one.
  bool include_rectangular = true;
  int reps = 20;
  EvalGeometry evaluation = EvalGeometry::Rectangular;
  double detect_threshold_kmh = 10.0;
};

/// Single-run settings for the estimate command.
struct EstimateConfig {
  double penetration = 1.0;
  CorruptionPlan corruption;
};

struct RunConfig {
  DatasetSource dataset = SyntheticSource{};
  GridSpec grid;
  SolverConfig solver;
  EstimateConfig estimate;
  ExperimentConfig experiment;
  std::filesystem::path output_dir = "out";
  double heatmap_vmax_kmh = 120.0;
  /// Master seed; per-repetition seeds are derived from it.
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Sets a dotted path ("solver.lambda") in a JSON document. The value text
/// is parsed as JSON when possible and kept as a string otherwise.
void apply_override(json& doc, const std::string& assignment);

/// Validates and converts a config document. Relative paths resolve against
/// `base_dir`. Failures raise ErrorKind::Config with the dotted field path.
RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir = {});

/// Canonical echo of a parsed config: all defaults filled in and paths
/// absolute, so parse_run_config(config_to_json(c)) reproduces `c`.
json config_to_json(const RunConfig& config);

}  // namespace wavefill
