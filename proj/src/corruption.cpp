#include "wavefill/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "wavefill/error.hpp"
#include "wavefill/io.hpp"

namespace wavefill {

namespace {

std::vector<CellIndex> pick_cells(std::vector<CellIndex> pool, int count, std::mt19937_64& rng) {
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool.size() - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

}  // namespace

const char* to_string(CorruptionKind kind) { return kind == CorruptionKind::Type1 ? "TYPE1" : "TYPE2"; }

void CorruptionPlan::validate() const {
  if (count_type1 < 0 || count_type2 < 0) fail(ErrorKind::Parameter, "corruption counts must be >= 0");
  if (!(free_flow_threshold_kmh > 0.0) || !(jam_threshold_kmh > 0.0)) {
    fail(ErrorKind::Parameter, "corruption thresholds must be positive");
  }
  // Disjoint eligibility sets, so no cell can be drawn twice.
  if (!(jam_threshold_kmh < free_flow_threshold_kmh)) {
    fail(ErrorKind::Parameter, "corruption jam threshold must be below the free-flow threshold");
  }
}

InjectionResult inject(const StateMatrix& m, const CorruptionPlan& plan) {
  plan.validate();
  std::vector<CellIndex> free_flow;
  std::vector<CellIndex> jam;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (m.mask(r, c) != CellState::Observed) continue;
      if (m.values(r, c) >= plan.free_flow_threshold_kmh) free_flow.push_back({r, c});
      if (m.values(r, c) <= plan.jam_threshold_kmh) jam.push_back({r, c});
    }
  }
  if (free_flow.size() < static_cast<std::size_t>(plan.count_type1)) {
    fail(ErrorKind::Capacity, "type I corruption needs " + std::to_string(plan.count_type1) +
                                  " free-flow cells but only " + std::to_string(free_flow.size()) +
                                  " are eligible (short by " +
                                  std::to_string(plan.count_type1 - static_cast<int>(free_flow.size())) + ")");
  }
  if (jam.size() < static_cast<std::size_t>(plan.count_type2)) {
    fail(ErrorKind::Capacity, "type II corruption needs " + std::to_string(plan.count_type2) +
                                  " jam cells but only " + std::to_string(jam.size()) + " are eligible (short by " +
                                  std::to_string(plan.count_type2 - static_cast<int>(jam.size())) + ")");
  }

  InjectionResult out{m, {}};
  std::mt19937_64 rng(plan.seed);
  auto apply = [&](const std::vector<CellIndex>& cells, CorruptionKind kind, double offset) {
    for (const auto& cell : cells) {
      const double original = m.values(cell.row, cell.col);
      const double tampered = original + offset;
      out.matrix.values(cell.row, cell.col) = tampered;
      out.records.push_back({cell.row, cell.col, kind, original, tampered});
    }
  };
  apply(pick_cells(std::move(free_flow), plan.count_type1, rng), CorruptionKind::Type1, kType1OffsetKmh);
  apply(pick_cells(std::move(jam), plan.count_type2, rng), CorruptionKind::Type2, kType2OffsetKmh);
  return out;
}

StateMatrix restore(const StateMatrix& tampered, std::span<const CorruptionRecord> records) {
  StateMatrix out = tampered;
  for (const auto& rec : records) out.values(rec.row, rec.col) = rec.original_kmh;
  return out;
}

DetectionScore score_detection(const Eigen::MatrixXd& sparse, std::span<const CorruptionRecord> records,
                               double detect_threshold_kmh) {
  DetectionScore score;
  score.flagged = (sparse.array().abs() > detect_threshold_kmh).count();
  std::int64_t sign_ok = 0;
  for (const auto& rec : records) {
    if (rec.row >= sparse.rows() || rec.col >= sparse.cols()) {
      fail(ErrorKind::Parameter, "corruption record lies outside the sparse matrix");
    }
    const double entry = sparse(rec.row, rec.col);
    if (std::abs(entry) <= detect_threshold_kmh) continue;
    ++score.true_positives;
    const bool expected_negative = rec.kind == CorruptionKind::Type1;
    if ((entry < 0.0) == expected_negative) ++sign_ok;
  }
  const auto n = static_cast<std::int64_t>(records.size());
  auto ratio = [](std::int64_t num, std::int64_t den, bool vacuous) {
    if (den == 0) return vacuous ? 1.0 : 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  score.recall = ratio(score.true_positives, n, true);
  score.precision = ratio(score.true_positives, score.flagged, n == 0);
  score.sign_agreement = ratio(sign_ok, score.true_positives, n == 0);
  return score;
}

void write_corruption_records(std::ostream& out, std::span<const CorruptionRecord> records) {
  out << "row,col,kind,original,tampered\n";
  for (const auto& rec : records) {
    out << rec.row << ',' << rec.col << ',' << to_string(rec.kind) << ',' << format_fixed(rec.original_kmh) << ','
        << format_fixed(rec.tampered_kmh) << '\n';
  }
}

}  // namespace wavefill
