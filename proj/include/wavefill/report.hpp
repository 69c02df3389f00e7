#pragma once

#include <string>

#include "wavefill/eval.hpp"
#include "wavefill/serialize.hpp"

namespace wavefill {

/// One row per scenario with mean and sample std of RMSE/MAE, plus detection
/// means when the scenario injected corruption.
std::string report_csv(const ExperimentReport& report);

/// Full archive: scenario descriptors, per-repetition metrics and seeds.
/// Contains no wall-clock values, so reruns are byte-identical.
json report_json(const ExperimentReport& report);

/// Wall-clock statistics kept apart from the deterministic artifacts.
json timing_json(const ExperimentReport& report);

json to_json(const MetricPair& metrics);

}  // namespace wavefill
