#include "wavefill/config.hpp"

#include "wavefill/error.hpp"

namespace wavefill {

namespace fs = std::filesystem;

const char* to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::Tse: return "tse";
    case ExperimentMode::Rtse: return "rtse";
    case ExperimentMode::Sensitivity: return "sensitivity";
    case ExperimentMode::Ablation: return "ablation";
  }
  return "tse";
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(ErrorKind::Config, "override '" + assignment + "' must look like dotted.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) fail(ErrorKind::Config, "override path '" + path + "' has an empty component");
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) {
      fail(ErrorKind::Config, "override path '" + path + "' descends into a non-object at '" + key + "'");
    }
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

namespace {

template <typename F>
void as_config_error(const std::string& path, F&& action) {
  try {
    action();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Parameter) throw;
    fail(ErrorKind::Config, path + ": " + e.what());
  }
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.is_absolute() || base.empty()) return p.lexically_normal();
  return (base / p).lexically_normal();
}

std::vector<double> read_numbers(ObjectReader& r, const std::string& key, std::vector<double> fallback) {
  if (!r.optional(key)) return fallback;
  const auto& v = r.at(key);
  if (!v.is_array() || v.empty()) r.error(key, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) r.error(key, "expected a non-empty array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> read_integers(ObjectReader& r, const std::string& key, std::vector<int> fallback) {
  if (!r.optional(key)) return fallback;
  const auto& v = r.at(key);
  if (!v.is_array() || v.empty()) r.error(key, "expected a non-empty array of integers");
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer() || x.get<std::int64_t>() < 0) {
      r.error(key, "expected a non-empty array of non-negative integers");
    }
    out.push_back(static_cast<int>(x.get<std::int64_t>()));
  }
  return out;
}

CsvFormat read_format(const json& j, const std::string& path) {
  CsvFormat f;
  ObjectReader r(j, path);
  if (r.optional("columns")) {
    ObjectReader c(r.at("columns"), r.child_path("columns"));
    f.vehicle_id_column = c.string("vehicle_id", f.vehicle_id_column);
    f.time_column = c.string("time", f.time_column);
    f.position_column = c.string("position", f.position_column);
    f.speed_column = c.string("speed", f.speed_column);
    c.finish();
  }
  if (r.optional("units")) {
    ObjectReader u(r.at("units"), r.child_path("units"));
    const auto unit_path = r.child_path("units");
    const auto time = u.string("time", to_string(f.time_unit));
    const auto position = u.string("position", to_string(f.position_unit));
    const auto speed = u.string("speed", to_string(f.speed_unit));
    as_config_error(unit_path + ".time", [&] { f.time_unit = parse_time_unit(time); });
    as_config_error(unit_path + ".position", [&] { f.position_unit = parse_length_unit(position); });
    as_config_error(unit_path + ".speed", [&] { f.speed_unit = parse_speed_unit(speed); });
    u.finish();
  }
  f.time_origin = r.number("time_origin", f.time_origin);
  f.position_origin = r.number("position_origin", f.position_origin);
  if (r.optional("filter")) {
    ObjectReader flt(r.at("filter"), r.child_path("filter"));
    f.filter_column = flt.string("column");
    f.filter_value = flt.string("value");
    flt.finish();
  }
  const auto delim = r.string("delimiter", ",");
  if (delim.size() != 1) r.error("delimiter", "expected a single character");
  f.delimiter = delim[0];
  r.finish();
  return f;
}

DatasetSource read_dataset(const json& j, const std::string& path, const fs::path& base) {
  ObjectReader r(j, path);
  const int kinds = int(r.has("trajectories")) + int(r.has("synthetic")) + int(r.has("matrix"));
  if (kinds != 1) {
    fail(ErrorKind::Config, path + ": exactly one of 'trajectories', 'synthetic' or 'matrix' is required");
  }
  DatasetSource out;
  if (r.optional("trajectories")) {
    const auto tpath = r.child_path("trajectories");
    ObjectReader t(r.at("trajectories"), tpath);
    TrajectoryFileSource src;
    src.path = resolve(t.string("path"), base);
    if (!fs::exists(src.path)) t.error("path", "file not found: " + src.path.string());
    json rest = r.at("trajectories");
    rest.erase("path");
    src.format = read_format(rest, tpath);
    out = std::move(src);
  } else if (r.optional("synthetic")) {
    ObjectReader s(r.at("synthetic"), r.child_path("synthetic"));
    SyntheticSource src;
    if (s.optional("field")) {
      src.field = synthetic_from_json(s.at("field"), s.child_path("field"));
    }
    src.vehicle_count = static_cast<int>(s.integer("vehicle_count", src.vehicle_count));
    if (src.vehicle_count < 1) s.error("vehicle_count", "must be >= 1");
    src.entry_headway_s = s.number("entry_headway_s", src.entry_headway_s);
    if (!(src.entry_headway_s > 0.0)) s.error("entry_headway_s", "must be positive");
    s.finish();
    out = src;
  } else {
    MatrixFileSource src;
    const auto& m = r.at("matrix");
    if (!m.is_string()) r.error("matrix", "expected a path stem");
    src.stem = resolve(m.get<std::string>(), base);
    for (const char* ext : {".csv", ".json"}) {
      auto file = src.stem;
      file += ext;
      if (!fs::exists(file)) r.error("matrix", "file not found: " + file.string());
    }
    out = src;
  }
  r.finish();
  return out;
}

ExperimentConfig read_experiment(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  ExperimentConfig e;
  const auto mode = r.string("mode", "tse");
  if (mode == "tse") e.mode = ExperimentMode::Tse;
  else if (mode == "rtse") e.mode = ExperimentMode::Rtse;
  else if (mode == "sensitivity") e.mode = ExperimentMode::Sensitivity;
  else if (mode == "ablation") e.mode = ExperimentMode::Ablation;
  else r.error("mode", "expected tse, rtse, sensitivity or ablation");

  e.rates = read_numbers(r, "rates", e.rates);
  for (double rate : e.rates) {
    if (!(rate > 0.0 && rate <= 1.0)) r.error("rates", "penetration rates must lie in (0,1]");
  }
  e.penetration = r.number("penetration", e.penetration);
  if (!(e.penetration > 0.0 && e.penetration <= 1.0)) r.error("penetration", "must lie in (0,1]");
  e.corruption_levels = read_integers(r, "corruption_levels", e.corruption_levels);
  e.ablation_corruption_count = static_cast<int>(r.integer("ablation_corruption_count", e.ablation_corruption_count));
  if (e.ablation_corruption_count < 0) r.error("ablation_corruption_count", "must be >= 0");
  if (r.optional("corruption")) {
    e.corruption = corruption_from_json(r.at("corruption"), r.child_path("corruption"));
  }
  e.wave_speeds_kmh = read_numbers(r, "wave_speeds_kmh", e.wave_speeds_kmh);
  for (double v : e.wave_speeds_kmh) {
    if (!(v < 0.0)) r.error("wave_speeds_kmh", "wave speeds must be negative");
  }
  e.include_rectangular = r.boolean("include_rectangular", e.include_rectangular);
  e.reps = static_cast<int>(r.integer("reps", e.reps));
  if (e.reps < 1) r.error("reps", "must be >= 1");
  const auto geometry = r.string("evaluation", to_string(e.evaluation));
  as_config_error(r.child_path("evaluation"), [&] { e.evaluation = parse_eval_geometry(geometry); });
  e.detect_threshold_kmh = r.number("detect_threshold_kmh", e.detect_threshold_kmh);
  if (!(e.detect_threshold_kmh >= 0.0)) r.error("detect_threshold_kmh", "must be >= 0");
  r.finish();
  return e;
}

}  // namespace

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
  ObjectReader r(doc, "");
  RunConfig c;
  c.dataset = read_dataset(r.at("dataset"), "dataset", base_dir);
  c.grid = grid_from_json(r.at("grid"), "grid");
  if (r.optional("solver")) {
    c.solver = solver_from_json(r.at("solver"), "solver");
  }
  if (r.optional("estimate")) {
    ObjectReader e(r.at("estimate"), "estimate");
    c.estimate.penetration = e.number("penetration", c.estimate.penetration);
    if (!(c.estimate.penetration > 0.0 && c.estimate.penetration <= 1.0)) e.error("penetration", "must lie in (0,1]");
    if (e.optional("corruption")) {
      c.estimate.corruption = corruption_from_json(e.at("corruption"), "estimate.corruption");
    }
    e.finish();
  }
  if (r.optional("experiment")) {
    c.experiment = read_experiment(r.at("experiment"), "experiment");
  }
  if (r.optional("output")) {
    ObjectReader o(r.at("output"), "output");
    c.output_dir = resolve(o.string("dir", c.output_dir.string()), base_dir);
    c.heatmap_vmax_kmh = o.number("heatmap_vmax_kmh", c.heatmap_vmax_kmh);
    if (!(c.heatmap_vmax_kmh > 0.0)) o.error("heatmap_vmax_kmh", "must be positive");
    o.finish();
  } else {
    c.output_dir = resolve(c.output_dir, base_dir);
  }
  c.seed = r.seed("seed", c.seed);
  c.threads = static_cast<int>(r.integer("threads", c.threads));
  if (c.threads < 1) r.error("threads", "must be >= 1");
  r.finish();

  // The dataset and the grid must describe the same domain.
  if (const auto* syn = std::get_if<SyntheticSource>(&c.dataset)) {
    as_config_error("dataset.synthetic.field", [&] {
      GroundTruthField(syn->field, c.grid.segment_length_m, c.grid.window_length_s);
    });
  }
  return c;
}

namespace {

json format_to_json(const CsvFormat& f) {
  json j = {{"columns",
             {{"vehicle_id", f.vehicle_id_column},
              {"time", f.time_column},
              {"position", f.position_column},
              {"speed", f.speed_column}}},
            {"units",
             {{"time", to_string(f.time_unit)},
              {"position", to_string(f.position_unit)},
              {"speed", to_string(f.speed_unit)}}},
            {"time_origin", f.time_origin},
            {"position_origin", f.position_origin},
            {"delimiter", std::string(1, f.delimiter)}};
  if (f.filter_column) j["filter"] = {{"column", *f.filter_column}, {"value", f.filter_value}};
  return j;
}

}  // namespace

json config_to_json(const RunConfig& c) {
  json dataset;
  if (const auto* t = std::get_if<TrajectoryFileSource>(&c.dataset)) {
    json tj = format_to_json(t->format);
    tj["path"] = t->path.string();
    dataset["trajectories"] = tj;
  } else if (const auto* s = std::get_if<SyntheticSource>(&c.dataset)) {
    dataset["synthetic"] = {
        {"field", to_json(s->field)}, {"vehicle_count", s->vehicle_count}, {"entry_headway_s", s->entry_headway_s}};
  } else {
    dataset["matrix"] = std::get<MatrixFileSource>(c.dataset).stem.string();
  }
  const auto& e = c.experiment;
  return {{"dataset", dataset},
          {"grid", to_json(c.grid)},
          {"solver", to_json(c.solver)},
          {"estimate", {{"penetration", c.estimate.penetration}, {"corruption", to_json(c.estimate.corruption)}}},
          {"experiment",
           {{"mode", to_string(e.mode)},
            {"rates", e.rates},
            {"penetration", e.penetration},
            {"corruption_levels", e.corruption_levels},
            {"ablation_corruption_count", e.ablation_corruption_count},
            {"corruption", to_json(e.corruption)},
            {"wave_speeds_kmh", e.wave_speeds_kmh},
            {"include_rectangular", e.include_rectangular},
            {"reps", e.reps},
            {"evaluation", to_string(e.evaluation)},
            {"detect_threshold_kmh", e.detect_threshold_kmh}}},
          {"output", {{"dir", c.output_dir.string()}, {"heatmap_vmax_kmh", c.heatmap_vmax_kmh}}},
          {"seed", c.seed},
          {"threads", c.threads}};
}

}  // namespace wavefill
