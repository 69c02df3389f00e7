#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "wavefill/trajectory.hpp"

namespace wavefill {

/// Spatiotemporal binning of a segment [0,S] x window [0,W]. With a wave
/// speed the column edges are skewed along the backward-wave
/// characteristics (an oblique grid); without one the grid is rectangular.
struct GridSpec {
  double segment_length_m = 0.0;
  double window_length_s = 0.0;
  double ds_m = 0.0;
  double dt_s = 0.0;
  std::optional<double> wave_speed_kmh;

  void validate() const;
  bool oblique() const { return wave_speed_kmh.has_value(); }
  /// 3.6 / v in seconds per meter (negative), or 0 for rectangular grids.
  double tan_theta() const;
  /// S * tan_theta.
  double intercept() const;
  Eigen::Index rows() const;
  Eigen::Index cols() const;
  GridSpec rectangular() const;

  bool operator==(const GridSpec&) const = default;
};

enum class CellState : std::uint8_t { Observed = 0, Missing = 1, OutOfDomain = 2 };

using MaskMatrix = Eigen::Matrix<CellState, Eigen::Dynamic, Eigen::Dynamic>;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Speed matrix in km/h. Cells built from observations hold the mean of
/// their samples; MISSING and OUT_OF_DOMAIN cells hold NaN. Estimates
/// produced by the solver keep the input mask but carry finite values in
/// every in-domain cell.
struct StateMatrix {
  GridSpec grid;
  Eigen::MatrixXd values;
  MaskMatrix mask;
  CountMatrix counts;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  std::int64_t observed_count() const;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> observed() const;
};

struct CellIndex {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  bool operator==(const CellIndex&) const = default;
};

/// Row = floor(s/ds); column = floor((t - s*tan_theta)/dt), i.e. time shifted
/// along the wave line back to s=0. Points on the closed upper edges land in
/// the last row/column.
CellIndex cell_index(double position_m, double time_s, const GridSpec& grid);
CellIndex cell_index(const TrajectoryPoint& point, const GridSpec& grid);

/// True when the cell's parallelogram footprint misses [0,W] entirely.
bool cell_out_of_domain(Eigen::Index row, Eigen::Index col, const GridSpec& grid);

MaskMatrix domain_mask(const GridSpec& grid);

StateMatrix build_matrix(const TrajectorySet& trajectories, const GridSpec& grid);

/// Same as build_matrix; the result is the evaluation reference when built
/// from all trajectory points.
StateMatrix ground_truth_matrix(const TrajectorySet& full_trajectories, const GridSpec& grid);

/// Nearest-cell resampling onto a rectangular grid over the same domain.
StateMatrix rasterize(const StateMatrix& source, const GridSpec& target);

/// Wraps solver output as a StateMatrix over `input`'s grid and mask;
/// out-of-domain cells are reset to NaN.
StateMatrix estimate_matrix(const StateMatrix& input, const Eigen::MatrixXd& values);

}  // namespace wavefill
