#include "wavefill/report.hpp"

#include "wavefill/io.hpp"

namespace wavefill {

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

}  // namespace

json to_json(const MetricPair& metrics) {
  return {{"rmse_kmh", metrics.rmse_kmh}, {"mae_kmh", metrics.mae_kmh}, {"n_cells", metrics.n_cells}};
}

std::string report_csv(const ExperimentReport& report) {
  std::string out =
      "scenario,grid,wave_speed_kmh,penetration,type1,type2,rank_surrogate,sparse_term,reps,"
      "rmse_mean,rmse_std,mae_mean,mae_std,recall_mean,precision_mean,sign_agreement_mean\n";
  for (const auto& sr : report.scenarios) {
    const auto& sc = sr.scenario;
    out += csv_field(sc.label) + ',' + (sc.grid.oblique() ? "oblique" : "rectangular") + ',' +
           (sc.grid.wave_speed_kmh ? format_fixed(*sc.grid.wave_speed_kmh, 3) : std::string("nan")) + ',' +
           format_fixed(sc.penetration, 4) + ',' + std::to_string(sc.corruption.count_type1) + ',' +
           std::to_string(sc.corruption.count_type2) + ',' + to_string(sc.solver.rank_surrogate) + ',' +
           (sc.solver.sparse_term_enabled ? "on" : "off") + ',' + std::to_string(sr.repetitions.size()) + ',' +
           format_fixed(sr.rmse.mean, 4) + ',' + format_fixed(sr.rmse.std, 4) + ',' + format_fixed(sr.mae.mean, 4) +
           ',' + format_fixed(sr.mae.std, 4) + ',' +
           (sr.recall ? format_fixed(sr.recall->mean, 4) : std::string("nan")) + ',' +
           (sr.precision ? format_fixed(sr.precision->mean, 4) : std::string("nan")) + ',' +
           (sr.sign_agreement ? format_fixed(sr.sign_agreement->mean, 4) : std::string("nan")) + '\n';
  }
  return out;
}

json report_json(const ExperimentReport& report) {
  json j;
  j["mode"] = report.mode;
  j["master_seed"] = report.master_seed;
  j["repetitions"] = report.repetitions;
  j["evaluation_geometry"] = to_string(report.geometry);
  j["seed_derivation"] = "splitmix64(splitmix64(master ^ (stream << 32)) + repetition); stream 1 = sampling, 2 = corruption";
  j["corruption_sampling"] = "uniform over eligible observed cells";
  json scenarios = json::array();
  for (const auto& sr : report.scenarios) {
    json s;
    s["label"] = sr.scenario.label;
    s["grid"] = to_json(sr.scenario.grid);
    s["solver"] = to_json(sr.scenario.solver);
    s["penetration"] = sr.scenario.penetration;
    s["corruption"] = to_json(sr.scenario.corruption);
    s["corruption"].erase("seed");
    s["rmse"] = summary_json(sr.rmse);
    s["mae"] = summary_json(sr.mae);
    if (sr.recall) {
      s["recall"] = summary_json(*sr.recall);
      s["precision"] = summary_json(*sr.precision);
      s["sign_agreement"] = summary_json(*sr.sign_agreement);
    }
    json reps = json::array();
    for (const auto& r : sr.repetitions) {
      json rj;
      rj["repetition"] = r.repetition;
      rj["sample_seed"] = r.sample_seed;
      rj["corruption_seed"] = r.corruption_seed;
      rj["metrics"] = to_json(r.metrics);
      rj["iterations"] = r.iterations;
      rj["converged"] = r.converged;
      if (r.detection) rj["detection"] = to_json(*r.detection);
      reps.push_back(std::move(rj));
    }
    s["per_repetition"] = std::move(reps);
    scenarios.push_back(std::move(s));
  }
  j["scenarios"] = std::move(scenarios);
  return j;
}

json timing_json(const ExperimentReport& report) {
  json scenarios = json::array();
  for (const auto& sr : report.scenarios) {
    json times = json::array();
    for (const auto& r : sr.repetitions) times.push_back(r.wall_time_s);
    scenarios.push_back({{"label", sr.scenario.label}, {"wall_time_s", summary_json(sr.wall_time)}, {"per_repetition", times}});
  }
  return {{"mode", report.mode}, {"scenarios", scenarios}};
}

}  // namespace wavefill
