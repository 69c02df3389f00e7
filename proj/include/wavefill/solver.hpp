#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wavefill/grid.hpp"

namespace wavefill {

enum class RankSurrogate { TruncatedNuclear, ConvexNuclear };

const char* to_string(RankSurrogate surrogate);
RankSurrogate parse_rank_surrogate(const std::string& text);

/// ADMM hyperparameters. The penalty follows rho <- min(rho_growth * rho,
/// rho_max) after every iteration; rho_growth = 1 keeps it fixed.
struct SolverConfig {
  double truncation_fraction = 0.3;
  double lambda = 0.04;
  double rho0 = 1e-4;
  double rho_growth = 1.05;
  double rho_max = 1e2;
  double epsilon = 1e-4;
  int max_iters = 500;
  RankSurrogate rank_surrogate = RankSurrogate::TruncatedNuclear;
  bool sparse_term_enabled = true;
  /// Upper clamp applied to the returned estimate only.
  double v_max_kmh = 120.0;

  void validate() const;
  /// Number of leading singular values left unshrunk for an m x n problem.
  Eigen::Index kept_rank(Eigen::Index rows, Eigen::Index cols) const;

  bool operator==(const SolverConfig&) const = default;
};

/// Iterates of the splitting M ~ L + S with auxiliary W and multiplier Y.
struct SolverState {
  Eigen::MatrixXd low_rank;
  Eigen::MatrixXd sparse;
  Eigen::MatrixXd aux;
  Eigen::MatrixXd multiplier;
  double rho = 0.0;
  int iter = 0;
};

struct SolverResult {
  Eigen::MatrixXd low_rank;  // clamped to [0, v_max]
  Eigen::MatrixXd sparse;
  int iterations = 0;
  std::vector<double> residual_trace;
  bool converged = false;
  double wall_time_s = 0.0;
};

/// Proximal operator of the truncated nuclear norm: the `keep_rank` largest
/// singular values of Z pass unchanged, the rest are soft-thresholded by
/// `threshold`.
Eigen::MatrixXd truncated_svt(const Eigen::MatrixXd& z, Eigen::Index keep_rank, double threshold);

/// Elementwise sgn(h) * max(|h| - tau, 0).
Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& h, double tau);

/// Observation data in solver form: values with unobserved entries replaced
/// by the mean over observed ones, plus the observation mask.
struct Observations {
  Eigen::MatrixXd filled;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> observed;
};

Observations prepare_observations(const StateMatrix& m);

/// L = W = filled M, S = Y = 0, rho = rho0.
SolverState initial_state(const Observations& obs, const SolverConfig& cfg);

/// One pass of the L, S, W, Y updates followed by the penalty update.
SolverState admm_step(SolverState state, const Observations& obs, const SolverConfig& cfg);
SolverState admm_step(SolverState state, const StateMatrix& m, const SolverConfig& cfg);

SolverResult solve(const StateMatrix& m, const SolverConfig& cfg);

}  // namespace wavefill
