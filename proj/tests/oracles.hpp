#pragma once

// Independent reference implementations used by the tests. Nothing here
// calls into the library's numerical code; SVDs come from Eigen's
// Jacobi/BDC solvers and every elementwise rule is spelled out as a loop.

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace oracle {

// Singular values in descending order.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& x) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues();
}

// tau * (sum of singular values beyond the r largest) + 0.5 * ||X - Z||_F^2
inline double tnn_prox_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z, Eigen::Index r, double tau) {
  const auto sv = singular_values(x);
  double tail = 0.0;
  for (Eigen::Index i = r; i < sv.size(); ++i) tail += sv(i);
  return tau * tail + 0.5 * (x - z).squaredNorm();
}

// U diag(sigma with all but the first r values soft-thresholded) V^T.
inline Eigen::MatrixXd svt(const Eigen::MatrixXd& z, Eigen::Index r, double tau) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = r; i < s.size(); ++i) s(i) = std::max(s(i) - tau, 0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

inline double soft(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

struct AdmmIterate {
  Eigen::MatrixXd l, s, w, y;
  double rho;
};

// One iteration written straight from the subproblem solutions:
//   L = D_r(W - S + Y/rho), S = shrink(W - L + Y/rho, lambda/rho),
//   W = M on observed cells and L + S - Y/rho elsewhere,
//   Y += rho (W - L - S), rho = min(mu rho, rho_max).
inline AdmmIterate admm_step(const AdmmIterate& in, const Eigen::MatrixXd& m,
                             const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& observed, Eigen::Index r,
                             double lambda, double mu, double rho_max) {
  AdmmIterate out = in;
  const double rho = in.rho;
  Eigen::MatrixXd z(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) z(i, j) = in.w(i, j) - in.s(i, j) + in.y(i, j) / rho;
  out.l = svt(z, r, 1.0 / rho);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out.s(i, j) = soft(in.w(i, j) - out.l(i, j) + in.y(i, j) / rho, lambda / rho);
      out.w(i, j) = observed(i, j) ? m(i, j) : out.l(i, j) + out.s(i, j) - in.y(i, j) / rho;
      out.y(i, j) = in.y(i, j) + rho * (out.w(i, j) - out.l(i, j) - out.s(i, j));
    }
  }
  out.rho = std::min(mu * rho, rho_max);
  return out;
}

// A * B^T with uniform non-negative factors, scaled so the largest entry is
// `peak`. Entries lie in [0, peak] and the rank is exactly `rank` (almost
// surely).
inline Eigen::MatrixXd low_rank(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank, double peak,
                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd a(rows, rank), b(cols, rank);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = u(rng);
  const Eigen::MatrixXd x = a * b.transpose();
  return x * (peak / x.maxCoeff());
}

inline double sample_std(const std::vector<double>& v) {
  long double mean = 0.0L;
  for (double x : v) mean += x;
  mean /= static_cast<long double>(v.size());
  long double ss = 0.0L;
  for (double x : v) ss += (x - mean) * (x - mean);
  return static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size() - 1)));
}

}  // namespace oracle
