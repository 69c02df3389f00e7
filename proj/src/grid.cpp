#include "wavefill/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavefill/error.hpp"

namespace wavefill {

namespace {

// Absorbs rounding in 3.6/v so that lattice-aligned points bin consistently.
constexpr double kBinSlack = 1e-9;

bool same_length(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

Eigen::Index clamp_index(double raw, Eigen::Index n) {
  const auto i = static_cast<Eigen::Index>(std::floor(raw + kBinSlack));
  return std::clamp<Eigen::Index>(i, 0, n - 1);
}

}  // namespace

void GridSpec::validate() const {
  if (!(segment_length_m > 0.0)) fail(ErrorKind::Parameter, "grid segment_length_m must be positive");
  if (!(window_length_s > 0.0)) fail(ErrorKind::Parameter, "grid window_length_s must be positive");
  if (!(ds_m > 0.0)) fail(ErrorKind::Parameter, "grid ds_m must be positive");
  if (!(dt_s > 0.0)) fail(ErrorKind::Parameter, "grid dt_s must be positive");
  if (wave_speed_kmh && !(*wave_speed_kmh < 0.0)) {
    fail(ErrorKind::Parameter, "grid wave_speed_kmh must be strictly negative");
  }
}

double GridSpec::tan_theta() const { return wave_speed_kmh ? 3.6 / *wave_speed_kmh : 0.0; }

double GridSpec::intercept() const { return segment_length_m * tan_theta(); }

Eigen::Index GridSpec::rows() const {
  return static_cast<Eigen::Index>(std::ceil(segment_length_m / ds_m - kBinSlack));
}

Eigen::Index GridSpec::cols() const {
  const double span = window_length_s + std::abs(intercept());
  return static_cast<Eigen::Index>(std::ceil(span / dt_s - kBinSlack));
}

GridSpec GridSpec::rectangular() const {
  GridSpec g = *this;
  g.wave_speed_kmh.reset();
  return g;
}

std::int64_t StateMatrix::observed_count() const {
  return (mask.array() == CellState::Observed).count();
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> StateMatrix::observed() const {
  return (mask.array() == CellState::Observed).matrix();
}

CellIndex cell_index(double position_m, double time_s, const GridSpec& grid) {
  // The column coordinate t - (b - (S - s)*tan_theta) reduces to
  // t - s*tan_theta: the arrival time of the point's wave line at s = 0.
  const double shifted = time_s - position_m * grid.tan_theta();
  return {clamp_index(position_m / grid.ds_m, grid.rows()), clamp_index(shifted / grid.dt_s, grid.cols())};
}

CellIndex cell_index(const TrajectoryPoint& point, const GridSpec& grid) {
  return cell_index(point.position_m, point.time_s, grid);
}

bool cell_out_of_domain(Eigen::Index row, Eigen::Index col, const GridSpec& grid) {
  const double slope = -grid.tan_theta();  // >= 0
  const double s_lo = static_cast<double>(row) * grid.ds_m;
  const double s_hi = std::min(static_cast<double>(row + 1) * grid.ds_m, grid.segment_length_m);
  const double t_max = static_cast<double>(col + 1) * grid.dt_s - slope * s_lo;
  const double t_min = static_cast<double>(col) * grid.dt_s - slope * s_hi;
  return t_max <= 0.0 || t_min > grid.window_length_s;
}

MaskMatrix domain_mask(const GridSpec& grid) {
  grid.validate();
  MaskMatrix mask(grid.rows(), grid.cols());
  for (Eigen::Index c = 0; c < mask.cols(); ++c) {
    for (Eigen::Index r = 0; r < mask.rows(); ++r) {
      mask(r, c) = cell_out_of_domain(r, c, grid) ? CellState::OutOfDomain : CellState::Missing;
    }
  }
  return mask;
}

StateMatrix build_matrix(const TrajectorySet& trajectories, const GridSpec& grid) {
  grid.validate();
  if (!same_length(trajectories.segment_length_m(), grid.segment_length_m) ||
      !same_length(trajectories.window_length_s(), grid.window_length_s)) {
    fail(ErrorKind::Parameter, "trajectory domain does not match the grid domain");
  }
  StateMatrix m;
  m.grid = grid;
  m.mask = domain_mask(grid);
  m.counts = CountMatrix::Zero(grid.rows(), grid.cols());
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(grid.rows(), grid.cols());
  for (const auto& track : trajectories.tracks()) {
    for (const auto& p : track) {
      const auto idx = cell_index(p, grid);
      sums(idx.row, idx.col) += p.speed_kmh;
      ++m.counts(idx.row, idx.col);
    }
  }
  m.values = Eigen::MatrixXd::Constant(grid.rows(), grid.cols(), std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (m.counts(r, c) > 0) {
        m.values(r, c) = sums(r, c) / static_cast<double>(m.counts(r, c));
        m.mask(r, c) = CellState::Observed;
      }
    }
  }
  return m;
}

StateMatrix ground_truth_matrix(const TrajectorySet& full_trajectories, const GridSpec& grid) {
  return build_matrix(full_trajectories, grid);
}

StateMatrix rasterize(const StateMatrix& source, const GridSpec& target) {
  target.validate();
  if (target.oblique()) fail(ErrorKind::Parameter, "rasterize target must be a rectangular grid");
  if (!same_length(source.grid.segment_length_m, target.segment_length_m) ||
      !same_length(source.grid.window_length_s, target.window_length_s)) {
    fail(ErrorKind::Parameter, "rasterize source and target domains differ");
  }
  StateMatrix out;
  out.grid = target;
  out.values.resize(target.rows(), target.cols());
  out.mask.resize(target.rows(), target.cols());
  out.counts.resize(target.rows(), target.cols());
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double t = std::min((static_cast<double>(c) + 0.5) * target.dt_s, target.window_length_s);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      const double s = std::min((static_cast<double>(r) + 0.5) * target.ds_m, target.segment_length_m);
      const auto idx = cell_index(s, t, source.grid);
      out.values(r, c) = source.values(idx.row, idx.col);
      out.mask(r, c) = source.mask(idx.row, idx.col);
      out.counts(r, c) = source.counts(idx.row, idx.col);
    }
  }
  return out;
}

StateMatrix estimate_matrix(const StateMatrix& input, const Eigen::MatrixXd& values) {
  if (values.rows() != input.rows() || values.cols() != input.cols()) {
    fail(ErrorKind::Parameter, "estimate shape does not match the input matrix");
  }
  StateMatrix out = input;
  out.values = values;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      if (out.mask(r, c) == CellState::OutOfDomain) out.values(r, c) = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

}  // namespace wavefill
