#include "wavefill/solver.hpp"

#include <chrono>
#include <cmath>

#include "wavefill/error.hpp"

namespace wavefill {

const char* to_string(RankSurrogate surrogate) {
  return surrogate == RankSurrogate::TruncatedNuclear ? "truncated_nn" : "convex_nn";
}

RankSurrogate parse_rank_surrogate(const std::string& text) {
  if (text == "truncated_nn" || text == "TRUNCATED_NN") return RankSurrogate::TruncatedNuclear;
  if (text == "convex_nn" || text == "CONVEX_NN") return RankSurrogate::ConvexNuclear;
  fail(ErrorKind::Parameter, "unknown rank surrogate '" + text + "' (expected truncated_nn or convex_nn)");
}

void SolverConfig::validate() const {
  if (!(truncation_fraction >= 0.0 && truncation_fraction < 1.0)) {
    fail(ErrorKind::Parameter, "truncation_fraction must lie in [0,1)");
  }
  if (!(lambda > 0.0)) fail(ErrorKind::Parameter, "lambda must be positive");
  if (!(rho0 > 0.0)) fail(ErrorKind::Parameter, "rho0 must be positive");
  if (!(rho_growth >= 1.0)) fail(ErrorKind::Parameter, "rho_growth must be >= 1");
  if (!(rho_max >= rho0)) fail(ErrorKind::Parameter, "rho_max must be >= rho0");
  if (!(epsilon > 0.0)) fail(ErrorKind::Parameter, "epsilon must be positive");
  if (max_iters < 1) fail(ErrorKind::Parameter, "max_iters must be >= 1");
  if (!(v_max_kmh > 0.0)) fail(ErrorKind::Parameter, "v_max_kmh must be positive");
}

Eigen::Index SolverConfig::kept_rank(Eigen::Index rows, Eigen::Index cols) const {
  if (rank_surrogate == RankSurrogate::ConvexNuclear) return 0;
  const auto n = std::min(rows, cols);
  const auto r = static_cast<Eigen::Index>(std::floor(truncation_fraction * static_cast<double>(n)));
  return std::clamp<Eigen::Index>(r, 0, std::max<Eigen::Index>(n - 1, 0));
}

Eigen::MatrixXd truncated_svt(const Eigen::MatrixXd& z, Eigen::Index keep_rank, double threshold) {
  if (!(threshold >= 0.0)) fail(ErrorKind::Parameter, "SVT threshold must be >= 0");
  if (keep_rank < 0) fail(ErrorKind::Parameter, "SVT kept rank must be >= 0");
  if (!z.allFinite()) fail(ErrorKind::Numerical, "SVT input contains non-finite entries");
  const auto n = std::min(z.rows(), z.cols());
  if (n == 0 || keep_rank >= n) return z;

  // Singular pairs come from the eigendecomposition of the smaller Gram
  // matrix, so each call costs O(min(m,n)^2 * max(m,n)). The result is
  // U diag(sigma'/sigma) U^T Z, which never divides by a vanishing sigma
  // because sigma' = 0 there.
  const bool wide = z.rows() <= z.cols();
  const Eigen::MatrixXd gram = wide ? Eigen::MatrixXd(z * z.transpose()) : Eigen::MatrixXd(z.transpose() * z);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) fail(ErrorKind::Numerical, "eigendecomposition failed in SVT");

  // Eigenvalues are ascending; the kept block is the last keep_rank entries.
  Eigen::VectorXd gain(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i >= n - keep_rank) {
      gain(i) = 1.0;
      continue;
    }
    const double sigma = std::sqrt(std::max(eig.eigenvalues()(i), 0.0));
    gain(i) = sigma > threshold ? (sigma - threshold) / sigma : 0.0;
  }
  const Eigen::MatrixXd& basis = eig.eigenvectors();
  if (wide) return basis * (gain.asDiagonal() * (basis.transpose() * z));
  return (z * basis) * gain.asDiagonal() * basis.transpose();
}

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& h, double tau) {
  if (!(tau >= 0.0)) fail(ErrorKind::Parameter, "shrinkage threshold must be >= 0");
  return h.unaryExpr([tau](double x) {
    const double mag = std::abs(x) - tau;
    if (mag <= 0.0) return 0.0;
    return x > 0.0 ? mag : -mag;
  });
}

Observations prepare_observations(const StateMatrix& m) {
  Observations obs;
  obs.observed = m.observed();
  const auto n = obs.observed.count();
  if (n == 0) fail(ErrorKind::EmptyObservation, "matrix has no observed cells");
  double sum = 0.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (obs.observed(r, c)) sum += m.values(r, c);
    }
  }
  const double mean = sum / static_cast<double>(n);
  obs.filled = obs.observed.select(m.values, Eigen::MatrixXd::Constant(m.rows(), m.cols(), mean));
  if (!obs.filled.allFinite()) fail(ErrorKind::Numerical, "observed cells contain non-finite values");
  return obs;
}

SolverState initial_state(const Observations& obs, const SolverConfig& cfg) {
  SolverState s;
  s.low_rank = obs.filled;
  s.aux = obs.filled;
  s.sparse = Eigen::MatrixXd::Zero(obs.filled.rows(), obs.filled.cols());
  s.multiplier = Eigen::MatrixXd::Zero(obs.filled.rows(), obs.filled.cols());
  s.rho = cfg.rho0;
  s.iter = 0;
  return s;
}

SolverState admm_step(SolverState state, const Observations& obs, const SolverConfig& cfg) {
  const auto rows = obs.filled.rows();
  const auto cols = obs.filled.cols();
  if (state.low_rank.rows() != rows || state.low_rank.cols() != cols || state.sparse.rows() != rows ||
      state.sparse.cols() != cols || state.aux.rows() != rows || state.aux.cols() != cols ||
      state.multiplier.rows() != rows || state.multiplier.cols() != cols) {
    fail(ErrorKind::Parameter, "solver state shape does not match the observations");
  }
  const double rho = state.rho;
  const Eigen::MatrixXd scaled_dual = state.multiplier / rho;

  state.low_rank = truncated_svt(state.aux - state.sparse + scaled_dual, cfg.kept_rank(rows, cols), 1.0 / rho);
  if (cfg.sparse_term_enabled) {
    state.sparse = soft_threshold(state.aux - state.low_rank + scaled_dual, cfg.lambda / rho);
  } else {
    state.sparse.setZero();
  }
  state.aux = obs.observed.select(obs.filled, state.low_rank + state.sparse - scaled_dual);
  state.multiplier += rho * (state.aux - state.low_rank - state.sparse);
  state.rho = std::min(cfg.rho_growth * rho, cfg.rho_max);
  ++state.iter;
  return state;
}

SolverState admm_step(SolverState state, const StateMatrix& m, const SolverConfig& cfg) {
  return admm_step(std::move(state), prepare_observations(m), cfg);
}

SolverResult solve(const StateMatrix& m, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto obs = prepare_observations(m);
  auto state = initial_state(obs, cfg);

  const double denom = obs.observed.select(obs.filled, Eigen::MatrixXd::Zero(m.rows(), m.cols())).norm();
  SolverResult result;
  while (state.iter < cfg.max_iters) {
    const Eigen::MatrixXd previous = state.low_rank;
    state = admm_step(std::move(state), obs, cfg);
    if (!state.low_rank.allFinite() || !state.sparse.allFinite() || !state.multiplier.allFinite()) {
      fail(ErrorKind::Numerical, "non-finite iterate at iteration " + std::to_string(state.iter));
    }
    const double change = (state.low_rank - previous).norm();
    const double residual = denom > 0.0 ? change / denom : change;
    result.residual_trace.push_back(residual);
    if (residual < cfg.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.iterations = state.iter;
  result.low_rank = state.low_rank.cwiseMax(0.0).cwiseMin(cfg.v_max_kmh);
  result.sparse = std::move(state.sparse);
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace wavefill
