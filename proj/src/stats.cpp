#include "pef/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SparseCore>

#include "pef/errors.hpp"

namespace pef {

namespace {

constexpr double kRssFloor = 1e-12;

Eigen::MatrixXd centred(const Eigen::MatrixXd& x) {
  return x.rowwise() - x.colwise().mean();
}

// Normalises a centred cross-product matrix into correlations.
Eigen::MatrixXd correlations_from_cross(const Eigen::MatrixXd& cross,
                                        const std::vector<bool>& constant) {
  const Eigen::Index n = cross.rows();
  Eigen::VectorXd inv_sd(n);
  std::vector<bool> flat(constant);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = cross(i, i);
    if (!(v > 0.0)) flat[i] = true;
    inv_sd(i) = flat[i] ? 0.0 : 1.0 / std::sqrt(v);
  }
  Eigen::MatrixXd r = inv_sd.asDiagonal() * cross * inv_sd.asDiagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::clamp(0.5 * (r(i, j) + r(j, i)), -1.0, 1.0);
      r(i, j) = v;
      r(j, i) = v;
    }
    r(i, i) = 1.0;
  }
  return r;
}

Eigen::MatrixXd design_matrix(const StaticDataset& ds, std::span<const int> regressors) {
  Eigen::MatrixXd x(ds.rows(), static_cast<Eigen::Index>(regressors.size()) + 1);
  x.col(0).setOnes();
  for (std::size_t k = 0; k < regressors.size(); ++k) {
    x.col(static_cast<Eigen::Index>(k) + 1) = ds.values().col(regressors[k]);
  }
  return x;
}

constexpr std::size_t kSmallConditioning = 8;

// LDLT::rcond() misses exactly singular input (a zero pivot), so the pivots
// are checked directly as well.
template <typename Ldlt>
bool well_conditioned(const Ldlt& ldlt, double tol) {
  if (ldlt.info() != Eigen::Success) return false;
  const auto d = ldlt.vectorD();
  const double top = d.cwiseAbs().maxCoeff();
  return top > 0.0 && d.minCoeff() > tol * top && ldlt.rcond() > tol;
}

// Schur complement of the conditioning block: covariance of (i, j) given z.
// MaxQ bounds |z| so that small sets avoid heap allocation.
template <int MaxQ>
std::optional<double> partial_correlation_schur(const CorrelationMatrix& c, int i, int j,
                                                std::span<const int> z) {
  using Block = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, MaxQ, MaxQ>;
  using Pair = Eigen::Matrix<double, Eigen::Dynamic, 2, 0, MaxQ, 2>;
  const auto q = static_cast<Eigen::Index>(z.size());
  Block zz(q, q);
  Pair zab(q, 2);
  for (Eigen::Index a = 0; a < q; ++a) {
    for (Eigen::Index b = 0; b < q; ++b) zz(a, b) = c(z[a], z[b]);
    zab(a, 0) = c(z[a], i);
    zab(a, 1) = c(z[a], j);
  }
  const Eigen::LDLT<Block> ldlt(zz);
  if (!well_conditioned(ldlt, 1e-10)) return std::nullopt;
  const Pair solved = ldlt.solve(zab);
  const Eigen::Matrix2d cond =
      Eigen::Matrix2d{{1.0, c(i, j)}, {c(j, i), 1.0}} - zab.transpose() * solved;
  if (!(cond(0, 0) > 1e-10) || !(cond(1, 1) > 1e-10)) return std::nullopt;
  return std::clamp(cond(0, 1) / std::sqrt(cond(0, 0) * cond(1, 1)), -1.0, 1.0);
}

void check_column(const StaticDataset& ds, int c) {
  if (c < 0 || c >= ds.cols()) throw std::out_of_range("column " + std::to_string(c));
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd r) : r_(std::move(r)) {
  if (r_.rows() != r_.cols()) throw std::invalid_argument("correlation matrix is not square");
  for (Eigen::Index i = 0; i < r_.rows(); ++i) {
    if (r_(i, i) != 1.0) throw std::invalid_argument("correlation diagonal must be 1");
    for (Eigen::Index j = 0; j < r_.cols(); ++j) {
      if (!(std::abs(r_(i, j)) <= 1.0)) throw std::invalid_argument("correlation outside [-1, 1]");
      if (std::abs(r_(i, j) - r_(j, i)) > 1e-12) {
        throw std::invalid_argument("correlation matrix is not symmetric");
      }
    }
  }
}

CorrelationMatrix correlation_matrix(const StaticDataset& ds) {
  if (ds.rows() < 3) throw DataError("correlation needs at least 3 rows");
  const Eigen::MatrixXd xc = centred(ds.values());
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(ds.cols(), ds.cols());
  cross.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose());
  cross = cross.selfadjointView<Eigen::Lower>();
  return CorrelationMatrix(correlations_from_cross(cross, ds.constant_flags()));
}

Eigen::MatrixXd dissimilarity(const CorrelationMatrix& c) {
  Eigen::MatrixXd d = 1.0 - c.matrix().array().abs();
  d.diagonal().setZero();
  return d;
}

std::optional<double> partial_correlation(const CorrelationMatrix& c, int i, int j,
                                          std::span<const int> z) {
  const int n = c.size();
  if (i < 0 || j < 0 || i >= n || j >= n) throw std::out_of_range("node index");
  if (i == j) throw std::invalid_argument("partial correlation of a node with itself");
  for (int k : z) {
    if (k == i || k == j) throw std::invalid_argument("conditioning set contains i or j");
    if (k < 0 || k >= n) throw std::out_of_range("conditioning node index");
  }
  if (z.empty()) return c(i, j);
  if (z.size() == 1) {
    const double rik = c(i, z[0]);
    const double rjk = c(j, z[0]);
    const double vi = 1.0 - rik * rik;
    const double vj = 1.0 - rjk * rjk;
    if (!(vi > 1e-10) || !(vj > 1e-10)) return std::nullopt;
    return std::clamp((c(i, j) - rik * rjk) / std::sqrt(vi * vj), -1.0, 1.0);
  }

  if (z.size() <= kSmallConditioning) {
    return partial_correlation_schur<kSmallConditioning>(c, i, j, z);
  }
  return partial_correlation_schur<Eigen::Dynamic>(c, i, j, z);
}

CiTestResult fisher_z_test(double r, int samples, int cond_size, double alpha) {
  const int dof = samples - cond_size - 3;
  if (dof < 1) {
    throw std::invalid_argument("Fisher z-test needs samples - |Z| - 3 >= 1 (samples=" +
                                std::to_string(samples) + ", |Z|=" + std::to_string(cond_size) +
                                ")");
  }
  if (std::isnan(r) || std::abs(r) > 1.0) throw std::invalid_argument("correlation outside [-1, 1]");
  CiTestResult out;
  if (std::abs(r) == 1.0) {
    out.statistic = std::copysign(std::numeric_limits<double>::infinity(), r);
    out.p_value = 0.0;
    out.reject = true;
    return out;
  }
  out.statistic = std::atanh(r) * std::sqrt(static_cast<double>(dof));
  out.p_value = std::erfc(std::abs(out.statistic) / std::sqrt(2.0));
  out.reject = out.p_value < alpha;
  return out;
}

Eigen::VectorXd regression_residual(const StaticDataset& ds, int target,
                                    std::span<const int> regressors) {
  check_column(ds, target);
  for (int k : regressors) check_column(ds, k);
  const Eigen::VectorXd y = ds.values().col(target);
  if (regressors.empty()) return y.array() - y.mean();
  const Eigen::MatrixXd x = design_matrix(ds, regressors);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  const Eigen::VectorXd beta = cod.solve(y);
  return y - x * beta;
}

double residual_correlation(const StaticDataset& ds, int i, int j, std::span<const int> ni,
                            std::span<const int> nj) {
  if (i == j) throw std::invalid_argument("residual correlation of a node with itself");
  if (std::find(ni.begin(), ni.end(), i) != ni.end() ||
      std::find(nj.begin(), nj.end(), j) != nj.end()) {
    throw std::invalid_argument("node listed among its own regressors");
  }
  if (ds.is_constant(i) || ds.is_constant(j)) return 0.0;
  const Eigen::VectorXd ri = regression_residual(ds, i, ni);
  const Eigen::VectorXd rj = regression_residual(ds, j, nj);
  const Eigen::VectorXd ci = ri.array() - ri.mean();
  const Eigen::VectorXd cj = rj.array() - rj.mean();
  const double denom = ci.norm() * cj.norm();
  if (!(denom > 0.0)) return 0.0;
  return std::clamp(ci.dot(cj) / denom, -1.0, 1.0);
}

Eigen::MatrixXd residual_correlation_matrix(const CorrelationMatrix& c,
                                            std::span<const std::vector<int>> regressors,
                                            const std::vector<bool>& constant) {
  const int n = c.size();
  if (static_cast<int>(regressors.size()) != n || static_cast<int>(constant.size()) != n) {
    throw std::invalid_argument("one regressor list and flag per node required");
  }
  // Column i of w maps the variables onto residual i: e_i - beta_i.
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < n; ++i) {
    if (constant[i]) continue;
    entries.emplace_back(i, i, 1.0);
    const std::vector<int>& ni = regressors[i];
    if (ni.empty()) continue;
    const auto q = static_cast<Eigen::Index>(ni.size());
    Eigen::MatrixXd zz(q, q);
    Eigen::VectorXd zy(q);
    for (Eigen::Index a = 0; a < q; ++a) {
      if (ni[a] == i || ni[a] < 0 || ni[a] >= n) throw std::invalid_argument("bad regressor");
      for (Eigen::Index b = 0; b < q; ++b) zz(a, b) = c(ni[a], ni[b]);
      zy(a) = c(ni[a], i);
    }
    const Eigen::VectorXd beta = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(zz).solve(zy);
    for (Eigen::Index a = 0; a < q; ++a) entries.emplace_back(ni[a], i, -beta(a));
  }
  Eigen::SparseMatrix<double> w(n, n);
  w.setFromTriplets(entries.begin(), entries.end());
  const Eigen::MatrixXd rw = c.matrix() * w;
  Eigen::MatrixXd cov = w.transpose() * rw;

  Eigen::VectorXd inv_sd(n);
  for (int i = 0; i < n; ++i) {
    // Residual variance relative to the unit variance of the node itself.
    inv_sd(i) = constant[i] || !(cov(i, i) > 1e-12) ? 0.0 : 1.0 / std::sqrt(cov(i, i));
  }
  Eigen::MatrixXd out = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = std::clamp(0.5 * (out(i, j) + out(j, i)), -1.0, 1.0);
      out(i, j) = v;
      out(j, i) = v;
    }
    out(i, i) = inv_sd(i) > 0.0 ? 1.0 : 0.0;
  }
  return out;
}

double choose_lambda(int n, int m) {
  if (n < 1 || m < 2) throw std::invalid_argument("choose_lambda needs n >= 1 and m >= 2");
  const auto nn = static_cast<long long>(n);
  return nn * nn > static_cast<long long>(m) ? 2.0 * std::log(static_cast<double>(n))
                                             : std::log(static_cast<double>(m));
}

double local_score(const StaticDataset& ds, int child, std::span<const int> parents,
                   double lambda) {
  check_column(ds, child);
  if (std::find(parents.begin(), parents.end(), child) != parents.end()) {
    throw std::invalid_argument("child listed among its parents");
  }
  const int m = ds.rows();
  if (m <= static_cast<int>(parents.size()) + 1) throw DataError("too few rows for local score");
  const Eigen::VectorXd resid = regression_residual(ds, child, parents);
  const double rss = std::max(resid.squaredNorm(), kRssFloor * m);
  return m * std::log(rss / m) + lambda * static_cast<double>(parents.size());
}

GaussianScorer::GaussianScorer(const StaticDataset& ds)
    : rows_(ds.rows()), constant_(ds.constant_flags()) {
  const Eigen::MatrixXd xc = centred(ds.values());
  cross_ = Eigen::MatrixXd::Zero(ds.cols(), ds.cols());
  cross_.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose());
  cross_ = cross_.selfadjointView<Eigen::Lower>();
}

double GaussianScorer::residual_sum_of_squares(int child, std::span<const int> parents) const {
  const double total = cross_(child, child);
  if (parents.empty()) return total;
  const auto q = static_cast<Eigen::Index>(parents.size());
  Eigen::MatrixXd pp(q, q);
  Eigen::VectorXd pc(q);
  for (Eigen::Index a = 0; a < q; ++a) {
    for (Eigen::Index b = 0; b < q; ++b) pp(a, b) = cross_(parents[a], parents[b]);
    pc(a) = cross_(parents[a], child);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(pp);
  double explained;
  if (well_conditioned(ldlt, 1e-12)) {
    explained = pc.dot(ldlt.solve(pc));
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(pp);
    explained = pc.dot(cod.solve(pc));
  }
  return total - explained;
}

double GaussianScorer::local_score(int child, std::span<const int> parents, double lambda) const {
  if (child < 0 || child >= cols()) throw std::out_of_range("child index");
  if (std::find(parents.begin(), parents.end(), child) != parents.end()) {
    throw std::invalid_argument("child listed among its parents");
  }
  if (rows_ <= static_cast<int>(parents.size()) + 1) throw DataError("too few rows for local score");
  const double rss = std::max(residual_sum_of_squares(child, parents), kRssFloor * rows_);
  return rows_ * std::log(rss / rows_) + lambda * static_cast<double>(parents.size());
}

CorrelationMatrix GaussianScorer::correlation() const {
  return CorrelationMatrix(correlations_from_cross(cross_, constant_));
}

}  // namespace pef
