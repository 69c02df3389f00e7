#include "wavefill/serialize.hpp"

#include "wavefill/error.hpp"

namespace wavefill {

ObjectReader::ObjectReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
  if (!object_.is_object()) fail(ErrorKind::Config, (path_.empty() ? "<root>" : path_) + ": expected an object");
}

bool ObjectReader::has(const std::string& key) const { return object_.contains(key) && !object_.at(key).is_null(); }

bool ObjectReader::optional(const std::string& key) {
  seen_.insert(key);
  return has(key);
}

std::string ObjectReader::child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

void ObjectReader::error(const std::string& key, const std::string& message) const {
  fail(ErrorKind::Config, child_path(key) + ": " + message);
}

const json& ObjectReader::at(const std::string& key) {
  seen_.insert(key);
  if (!object_.contains(key)) error(key, "required field is missing");
  return object_.at(key);
}

double ObjectReader::number(const std::string& key) {
  const auto& v = at(key);
  if (!v.is_number()) error(key, "expected a number");
  return v.get<double>();
}

double ObjectReader::number(const std::string& key, double fallback) {
  seen_.insert(key);
  return has(key) ? number(key) : fallback;
}

std::optional<double> ObjectReader::optional_number(const std::string& key) {
  seen_.insert(key);
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::int64_t ObjectReader::integer(const std::string& key) {
  const auto& v = at(key);
  if (!v.is_number_integer()) error(key, "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t ObjectReader::integer(const std::string& key, std::int64_t fallback) {
  seen_.insert(key);
  return has(key) ? integer(key) : fallback;
}

std::uint64_t ObjectReader::seed(const std::string& key, std::uint64_t fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  error(key, "expected a non-negative integer seed");
}

bool ObjectReader::boolean(const std::string& key, bool fallback) {
  seen_.insert(key);
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_boolean()) error(key, "expected true or false");
  return v.get<bool>();
}

std::string ObjectReader::string(const std::string& key) {
  const auto& v = at(key);
  if (!v.is_string()) error(key, "expected a string");
  return v.get<std::string>();
}

std::string ObjectReader::string(const std::string& key, const std::string& fallback) {
  seen_.insert(key);
  return has(key) ? string(key) : fallback;
}

void ObjectReader::finish() const {
  for (const auto& [key, value] : object_.items()) {
    if (!seen_.count(key)) error(key, "unknown field");
  }
}

namespace {

// Re-raises a domain validation failure as a config error at `path`.
template <typename F>
void validate_at(const std::string& path, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Parameter) throw;
    fail(ErrorKind::Config, (path.empty() ? "<root>" : path) + ": " + e.what());
  }
}

}  // namespace

json to_json(const GridSpec& grid) {
  json j = {{"segment_length_m", grid.segment_length_m},
            {"window_length_s", grid.window_length_s},
            {"ds_m", grid.ds_m},
            {"dt_s", grid.dt_s}};
  j["wave_speed_kmh"] = grid.wave_speed_kmh ? json(*grid.wave_speed_kmh) : json(nullptr);
  return j;
}

json to_json(const SolverConfig& cfg) {
  return {{"truncation_fraction", cfg.truncation_fraction},
          {"lambda", cfg.lambda},
          {"rho0", cfg.rho0},
          {"rho_growth", cfg.rho_growth},
          {"rho_max", cfg.rho_max},
          {"epsilon", cfg.epsilon},
          {"max_iters", cfg.max_iters},
          {"rank_surrogate", to_string(cfg.rank_surrogate)},
          {"sparse_term_enabled", cfg.sparse_term_enabled},
          {"v_max_kmh", cfg.v_max_kmh}};
}

json to_json(const SyntheticFieldSpec& spec) {
  return {{"free_flow_speed_kmh", spec.free_flow_speed_kmh},
          {"jam_speed_kmh", spec.jam_speed_kmh},
          {"wave_speed_kmh", spec.wave_speed_kmh},
          {"wave_band_count", spec.wave_band_count},
          {"wave_band_width_s", spec.wave_band_width_s},
          {"wave_spacing_s", spec.wave_spacing_s},
          {"first_band_start_s", spec.first_band_start_s},
          {"noise_std_kmh", spec.noise_std_kmh},
          {"seed", spec.seed}};
}

json to_json(const CorruptionPlan& plan) {
  return {{"count_type1", plan.count_type1},
          {"count_type2", plan.count_type2},
          {"seed", plan.seed},
          {"free_flow_threshold_kmh", plan.free_flow_threshold_kmh},
          {"jam_threshold_kmh", plan.jam_threshold_kmh}};
}

json to_json(const DetectionScore& score) {
  return {{"precision", score.precision},
          {"recall", score.recall},
          {"sign_agreement", score.sign_agreement},
          {"flagged", score.flagged},
          {"true_positives", score.true_positives}};
}

GridSpec grid_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  GridSpec g;
  g.segment_length_m = r.number("segment_length_m");
  g.window_length_s = r.number("window_length_s");
  g.ds_m = r.number("ds_m");
  g.dt_s = r.number("dt_s");
  g.wave_speed_kmh = r.optional_number("wave_speed_kmh");
  r.finish();
  validate_at(path, [&] { g.validate(); });
  return g;
}

SolverConfig solver_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SolverConfig c;
  c.truncation_fraction = r.number("truncation_fraction", c.truncation_fraction);
  c.lambda = r.number("lambda", c.lambda);
  c.rho0 = r.number("rho0", c.rho0);
  c.rho_growth = r.number("rho_growth", c.rho_growth);
  c.rho_max = r.number("rho_max", c.rho_max);
  c.epsilon = r.number("epsilon", c.epsilon);
  c.max_iters = static_cast<int>(r.integer("max_iters", c.max_iters));
  if (r.has("rank_surrogate")) {
    const auto text = r.string("rank_surrogate");
    validate_at(r.child_path("rank_surrogate"), [&] { c.rank_surrogate = parse_rank_surrogate(text); });
  }
  c.sparse_term_enabled = r.boolean("sparse_term_enabled", c.sparse_term_enabled);
  c.v_max_kmh = r.number("v_max_kmh", c.v_max_kmh);
  r.finish();
  validate_at(path, [&] { c.validate(); });
  return c;
}

SyntheticFieldSpec synthetic_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SyntheticFieldSpec s;
  s.free_flow_speed_kmh = r.number("free_flow_speed_kmh", s.free_flow_speed_kmh);
  s.jam_speed_kmh = r.number("jam_speed_kmh", s.jam_speed_kmh);
  s.wave_speed_kmh = r.number("wave_speed_kmh", s.wave_speed_kmh);
  s.wave_band_count = static_cast<int>(r.integer("wave_band_count", s.wave_band_count));
  s.wave_band_width_s = r.number("wave_band_width_s", s.wave_band_width_s);
  s.wave_spacing_s = r.number("wave_spacing_s", s.wave_spacing_s);
  s.first_band_start_s = r.number("first_band_start_s", s.first_band_start_s);
  s.noise_std_kmh = r.number("noise_std_kmh", s.noise_std_kmh);
  s.seed = r.seed("seed", s.seed);
  r.finish();
  validate_at(path, [&] { s.validate(); });
  return s;
}

CorruptionPlan corruption_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  CorruptionPlan p;
  p.count_type1 = static_cast<int>(r.integer("count_type1", p.count_type1));
  p.count_type2 = static_cast<int>(r.integer("count_type2", p.count_type2));
  p.seed = r.seed("seed", p.seed);
  p.free_flow_threshold_kmh = r.number("free_flow_threshold_kmh", p.free_flow_threshold_kmh);
  p.jam_threshold_kmh = r.number("jam_threshold_kmh", p.jam_threshold_kmh);
  r.finish();
  validate_at(path, [&] { p.validate(); });
  return p;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace wavefill
