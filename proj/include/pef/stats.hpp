#pragma once

#include <optional>
#include <span>

#include <Eigen/Core>

#include "pef/data.hpp"

namespace pef {

// Symmetric matrix of Pearson correlations with unit diagonal.
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  // Throws std::invalid_argument if r is not square, not symmetric within
  // 1e-12, has a non-unit diagonal or entries outside [-1, 1].
  explicit CorrelationMatrix(Eigen::MatrixXd r);

  int size() const { return static_cast<int>(r_.rows()); }
  double operator()(int i, int j) const { return r_(i, j); }
  const Eigen::MatrixXd& matrix() const { return r_; }

 private:
  Eigen::MatrixXd r_;
};

struct CiTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

// Pearson correlations; any pair involving a constant-flagged column is 0.
// Requires at least 3 rows.
CorrelationMatrix correlation_matrix(const StaticDataset& ds);

// d(i, j) = 1 - |r_ij|.
Eigen::MatrixXd dissimilarity(const CorrelationMatrix& c);

// Partial correlation of i and j given z, from the inverse of the
// correlation submatrix on {i, j} u z. Returns nullopt when that submatrix is
// numerically singular; callers treat such a test as not rejecting.
std::optional<double> partial_correlation(const CorrelationMatrix& c, int i, int j,
                                          std::span<const int> z);

// Two-sided z-test of zero correlation using Fisher's transform:
// statistic = atanh(r) * sqrt(samples - cond_size - 3).
// Throws std::invalid_argument if samples - cond_size - 3 < 1 or |r| > 1.
CiTestResult fisher_z_test(double r, int samples, int cond_size, double alpha);

// Least-squares residual of column `target` on the given columns plus an
// intercept. Rank-deficient designs use the minimum-norm solution.
Eigen::VectorXd regression_residual(const StaticDataset& ds, int target,
                                    std::span<const int> regressors);

// Correlation between the residuals of i on ni and of j on nj. Returns 0 if
// either residual vanishes.
double residual_correlation(const StaticDataset& ds, int i, int j, std::span<const int> ni,
                            std::span<const int> nj);

// All pairwise residual correlations at once, node i regressed on
// regressors[i], computed from the correlation matrix alone (residual
// correlations do not depend on the scale of the variables). Entry (i, j) is
// 0 when either residual vanishes or either node is constant.
Eigen::MatrixXd residual_correlation_matrix(const CorrelationMatrix& c,
                                            std::span<const std::vector<int>> regressors,
                                            const std::vector<bool>& constant);

// 2 ln n when n > sqrt(m) (risk inflation criterion), ln m otherwise (BIC).
double choose_lambda(int n, int m);

// Per-family score m ln(RSS/m) + lambda |parents| of the Gaussian regression
// of child on parents (with intercept). RSS is floored at 1e-12 m.
double local_score(const StaticDataset& ds, int child, std::span<const int> parents,
                   double lambda);

// Computes the same local scores as `local_score` from centred cross
// products, so that repeated family evaluations cost O(|parents|^3) instead of
// a pass over the data.
class GaussianScorer {
 public:
  explicit GaussianScorer(const StaticDataset& ds);

  int rows() const { return rows_; }
  int cols() const { return static_cast<int>(cross_.rows()); }
  double local_score(int child, std::span<const int> parents, double lambda) const;
  double residual_sum_of_squares(int child, std::span<const int> parents) const;
  // Correlations derived from the same cross products.
  CorrelationMatrix correlation() const;
  const std::vector<bool>& constant_flags() const { return constant_; }

 private:
  int rows_ = 0;
  Eigen::MatrixXd cross_;
  std::vector<bool> constant_;
};

}  // namespace pef
