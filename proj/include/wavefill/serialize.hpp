#pragma once

#include <json.hpp>
#include <set>
#include <string>

#include "wavefill/corruption.hpp"
#include "wavefill/grid.hpp"
#include "wavefill/solver.hpp"
#include "wavefill/synthetic.hpp"

namespace wavefill {

using nlohmann::json;

/// Reads fields of one JSON object, reporting failures as config errors
/// prefixed with the dotted field path. finish() rejects unknown keys.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path);

  bool has(const std::string& key) const;
  /// has() for an optional block; marks the key as known either way.
  bool optional(const std::string& key);
  const json& at(const std::string& key);
  std::string child_path(const std::string& key) const;

  double number(const std::string& key, double fallback);
  double number(const std::string& key);
  std::int64_t integer(const std::string& key, std::int64_t fallback);
  std::int64_t integer(const std::string& key);
  std::uint64_t seed(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key, const std::string& fallback);
  std::string string(const std::string& key);
  std::optional<double> optional_number(const std::string& key);

  void finish() const;
  [[noreturn]] void error(const std::string& key, const std::string& message) const;

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

json to_json(const GridSpec& grid);
json to_json(const SolverConfig& cfg);
json to_json(const SyntheticFieldSpec& spec);
json to_json(const CorruptionPlan& plan);
json to_json(const DetectionScore& score);

GridSpec grid_from_json(const json& j, const std::string& path);
SolverConfig solver_from_json(const json& j, const std::string& path);
SyntheticFieldSpec synthetic_from_json(const json& j, const std::string& path);
CorruptionPlan corruption_from_json(const json& j, const std::string& path);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const json& j);

}  // namespace wavefill
