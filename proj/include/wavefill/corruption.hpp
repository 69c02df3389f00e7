#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "wavefill/grid.hpp"

namespace wavefill {

/// Type I: a free-flow observation tampered down by 50 km/h.
/// Type II: a jam observation tampered up by 80 km/h.
enum class CorruptionKind { Type1, Type2 };

constexpr double kType1OffsetKmh = -50.0;
constexpr double kType2OffsetKmh = 80.0;

const char* to_string(CorruptionKind kind);

struct CorruptionPlan {
  int count_type1 = 0;
  int count_type2 = 0;
  std::uint64_t seed = 0;
  double free_flow_threshold_kmh = 50.0;
  double jam_threshold_kmh = 5.0;

  void validate() const;
  bool operator==(const CorruptionPlan&) const = default;
};

struct CorruptionRecord {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  CorruptionKind kind = CorruptionKind::Type1;
  double original_kmh = 0.0;
  double tampered_kmh = 0.0;

  bool operator==(const CorruptionRecord&) const = default;
};

struct InjectionResult {
  StateMatrix matrix;
  std::vector<CorruptionRecord> records;
};

/// Samples observed cells without replacement from each eligible set (type I
/// first, then type II, from one generator seeded with plan.seed).
InjectionResult inject(const StateMatrix& m, const CorruptionPlan& plan);

/// Undoes `records` on a tampered matrix.
StateMatrix restore(const StateMatrix& tampered, std::span<const CorruptionRecord> records);

struct DetectionScore {
  double precision = 0.0;
  double recall = 0.0;
  double sign_agreement = 0.0;
  std::int64_t flagged = 0;
  std::int64_t true_positives = 0;
};

/// Flags cells with |S| > threshold. Sign agreement is the fraction of
/// detected records whose entry sign matches the corruption (type I
/// negative, type II positive). Ratios with an empty denominator are 1 when
/// there was nothing to find and 0 otherwise.
DetectionScore score_detection(const Eigen::MatrixXd& sparse, std::span<const CorruptionRecord> records,
                               double detect_threshold_kmh = 10.0);

void write_corruption_records(std::ostream& out, std::span<const CorruptionRecord> records);

}  // namespace wavefill
