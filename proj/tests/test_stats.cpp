#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/QR>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "pef/errors.hpp"
#include "pef/stats.hpp"
#include "test_util.hpp"

namespace pef {
namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

Eigen::MatrixXd random_data(int m, int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(m, n);
  // Correlated columns: each column mixes a shared factor with its own noise.
  for (int r = 0; r < m; ++r) {
    const double f = nd(gen);
    for (int c = 0; c < n; ++c) x(r, c) = (0.3 + 0.1 * c) * f + nd(gen);
  }
  return x;
}

long double naive_corr(const Eigen::MatrixXd& x, int i, int j) {
  const int m = static_cast<int>(x.rows());
  long double mi = 0, mj = 0;
  for (int r = 0; r < m; ++r) {
    mi += x(r, i);
    mj += x(r, j);
  }
  mi /= m;
  mj /= m;
  long double sij = 0, sii = 0, sjj = 0;
  for (int r = 0; r < m; ++r) {
    sij += (x(r, i) - mi) * (x(r, j) - mj);
    sii += (x(r, i) - mi) * (x(r, i) - mi);
    sjj += (x(r, j) - mj) * (x(r, j) - mj);
  }
  return sij / std::sqrt(sii * sjj);
}

// First-order recursion on the conditioning set.
long double recursive_partial(const CorrelationMatrix& c, int i, int j, std::vector<int> z) {
  if (z.empty()) return c(i, j);
  const int k = z.back();
  z.pop_back();
  const long double rij = recursive_partial(c, i, j, z);
  const long double rik = recursive_partial(c, i, k, z);
  const long double rjk = recursive_partial(c, j, k, z);
  return (rij - rik * rjk) / std::sqrt((1 - rik * rik) * (1 - rjk * rjk));
}

TEST(Correlation, MatchesNaiveTwoPass) {
  const Eigen::MatrixXd x = random_data(200, 6, 1);
  const CorrelationMatrix c = correlation_matrix(testing::dataset(x));
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(c(i, i), 1.0);
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(c(i, j), static_cast<double>(naive_corr(x, i, j)), 1e-12);
  }
  const Eigen::MatrixXd d = dissimilarity(c);
  EXPECT_NEAR(d(0, 1), 1.0 - std::abs(c(0, 1)), 1e-15);
  EXPECT_EQ(d(2, 2), 0.0);
}

TEST(Correlation, ConstantColumnIsUncorrelated) {
  Eigen::MatrixXd x = random_data(50, 3, 2);
  x.col(1).setConstant(4.0);
  const CorrelationMatrix c = correlation_matrix(standardize(testing::dataset(x)));
  EXPECT_EQ(c(0, 1), 0.0);
  EXPECT_EQ(c(1, 1), 1.0);
}

TEST(Correlation, Validates) {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 1) = 0.5;
  EXPECT_THROW(CorrelationMatrix{bad}, std::invalid_argument);
  EXPECT_THROW(correlation_matrix(testing::dataset(Eigen::MatrixXd::Zero(2, 2))), DataError);
}

TEST(PartialCorrelation, MatchesRecursionOnRandomFixtures) {
  std::mt19937 gen(11);
  for (int fixture = 0; fixture < 100; ++fixture) {
    const int n = 5 + fixture % 4;
    const CorrelationMatrix c = correlation_matrix(testing::dataset(random_data(60, n, 100 + fixture)));
    std::vector<int> nodes = testing::identity_order(n);
    std::shuffle(nodes.begin(), nodes.end(), gen);
    const int q = std::min(fixture % 5, n - 2);
    const int i = nodes[0];
    const int j = nodes[1];
    const std::vector<int> z(nodes.begin() + 2, nodes.begin() + 2 + q);
    const auto r = partial_correlation(c, i, j, z);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(*r, static_cast<double>(recursive_partial(c, i, j, z)), 1e-8) << "fixture " << fixture;
  }
}

TEST(PartialCorrelation, SymmetricAndOrderFree) {
  const CorrelationMatrix c = correlation_matrix(testing::dataset(random_data(80, 6, 3)));
  const std::vector<int> z1{2, 4, 5};
  const std::vector<int> z2{5, 2, 4};
  EXPECT_NEAR(*partial_correlation(c, 0, 1, z1), *partial_correlation(c, 1, 0, z2), 1e-12);
}

TEST(PartialCorrelation, DegenerateConditioningGivesNullopt) {
  Eigen::MatrixXd x = random_data(50, 4, 4);
  x.col(3) = x.col(2);  // duplicate conditioning variable
  const CorrelationMatrix c = correlation_matrix(testing::dataset(x));
  EXPECT_FALSE(partial_correlation(c, 0, 1, std::vector<int>{2, 3}).has_value());
  // j perfectly explained by z.
  EXPECT_FALSE(partial_correlation(c, 0, 2, std::vector<int>{3}).has_value());
  EXPECT_THROW(partial_correlation(c, 0, 1, std::vector<int>{1}), std::invalid_argument);
}

TEST(FisherZ, MatchesHighPrecisionNormalTail) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> ur(-0.999, 0.999);
  for (int fixture = 0; fixture < 100; ++fixture) {
    const double r = fixture == 0 ? 0.0 : ur(gen) * (fixture % 3 == 0 ? 0.1 : 1.0);
    const int samples = 10 + fixture * 37;
    const int q = fixture % 6;
    const CiTestResult t = fisher_z_test(r, samples, q, 0.05);
    const Big z = boost::multiprecision::atanh(Big(r)) * boost::multiprecision::sqrt(Big(samples - q - 3));
    const Big p = boost::multiprecision::erfc(boost::multiprecision::abs(z) / boost::multiprecision::sqrt(Big(2)));
    EXPECT_NEAR(t.statistic, static_cast<double>(z), 1e-8 * std::max(1.0, std::abs(t.statistic)));
    EXPECT_NEAR(t.p_value, static_cast<double>(p), 1e-8);
    EXPECT_EQ(t.reject, static_cast<double>(p) < 0.05);
  }
}

TEST(FisherZ, EdgeCases) {
  const CiTestResult one = fisher_z_test(1.0, 100, 0, 0.05);
  EXPECT_TRUE(one.reject);
  EXPECT_EQ(one.p_value, 0.0);
  EXPECT_EQ(fisher_z_test(0.0, 100, 0, 0.05).p_value, 1.0);
  EXPECT_THROW(fisher_z_test(0.1, 5, 2, 0.05), std::invalid_argument);
  EXPECT_NO_THROW(fisher_z_test(0.1, 5, 1, 0.05));
}

TEST(Regression, MatchesHouseholderQr) {
  const Eigen::MatrixXd x = random_data(120, 5, 6);
  const StaticDataset ds = testing::dataset(x);
  const std::vector<int> regs{1, 3, 4};
  Eigen::MatrixXd design(120, 4);
  design.col(0).setOnes();
  for (int k = 0; k < 3; ++k) design.col(k + 1) = x.col(regs[k]);
  const Eigen::VectorXd beta = design.householderQr().solve(x.col(0));
  const Eigen::VectorXd expected = x.col(0) - design * beta;
  EXPECT_LT((regression_residual(ds, 0, regs) - expected).cwiseAbs().maxCoeff(), 1e-10);
  // No regressors: centring only.
  const Eigen::VectorXd c = regression_residual(ds, 2, {});
  EXPECT_LT((c.array() - (x.col(2).array() - x.col(2).mean())).abs().maxCoeff(), 1e-12);
}

TEST(Regression, RankDeficientUsesMinimumNorm) {
  Eigen::MatrixXd x = random_data(60, 3, 7);
  x.col(2) = x.col(1);
  const StaticDataset ds = testing::dataset(x);
  const Eigen::VectorXd both = regression_residual(ds, 0, std::vector<int>{1, 2});
  const Eigen::VectorXd one = regression_residual(ds, 0, std::vector<int>{1});
  EXPECT_LT((both - one).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ResidualCorrelation, MatrixFormMatchesDataForm) {
  const Eigen::MatrixXd x = random_data(150, 7, 8);
  const StaticDataset ds = standardize(testing::dataset(x));
  const std::vector<std::vector<int>> regs{{1, 2}, {0}, {}, {4, 5, 6}, {3}, {}, {0, 1}};
  const Eigen::MatrixXd rho =
      residual_correlation_matrix(correlation_matrix(ds), regs, ds.constant_flags());
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      if (i == j) continue;
      const bool i_in_j = std::find(regs[j].begin(), regs[j].end(), i) != regs[j].end();
      const bool j_in_i = std::find(regs[i].begin(), regs[i].end(), j) != regs[i].end();
      if (i_in_j || j_in_i) continue;
      EXPECT_NEAR(rho(i, j), residual_correlation(ds, i, j, regs[i], regs[j]), 1e-10)
          << i << "," << j;
    }
  }
}

TEST(ResidualCorrelation, ScaleInvariant) {
  Eigen::MatrixXd x = random_data(100, 4, 9);
  const StaticDataset a = testing::dataset(x);
  x.col(2) *= 17.0;
  x.col(0).array() += 3.0;
  const StaticDataset b = testing::dataset(x);
  const std::vector<int> ni{2};
  const std::vector<int> nj{3};
  EXPECT_NEAR(residual_correlation(a, 0, 1, ni, nj), residual_correlation(b, 0, 1, ni, nj), 1e-12);
}

TEST(Lambda, SwitchesBetweenRicAndBic) {
  EXPECT_DOUBLE_EQ(choose_lambda(1000, 1000), 2.0 * std::log(1000.0));
  EXPECT_DOUBLE_EQ(choose_lambda(10, 1000), std::log(1000.0));
  // n^2 == m falls on the BIC side.
  EXPECT_DOUBLE_EQ(choose_lambda(30, 900), std::log(900.0));
  EXPECT_DOUBLE_EQ(choose_lambda(31, 900), 2.0 * std::log(31.0));
}

TEST(LocalScore, ScorerMatchesDirectFit) {
  const StaticDataset ds = testing::dataset(random_data(300, 6, 10));
  const GaussianScorer scorer(ds);
  const std::vector<std::vector<int>> families{{}, {1}, {1, 2}, {2, 3, 4, 5}};
  for (const auto& pa : families) {
    EXPECT_NEAR(scorer.local_score(0, pa, 3.5), local_score(ds, 0, pa, 3.5), 1e-8);
  }
  // Direct formula m ln(RSS/m) + lambda |pa|.
  const Eigen::VectorXd r = regression_residual(ds, 0, families[2]);
  EXPECT_NEAR(local_score(ds, 0, families[2], 2.0), 300 * std::log(r.squaredNorm() / 300) + 4.0, 1e-9);
}

TEST(LocalScore, PerfectFitIsFloored) {
  Eigen::MatrixXd x = random_data(40, 2, 12);
  x.col(1) = 2.0 * x.col(0);
  const StaticDataset ds = testing::dataset(x);
  const double s = local_score(ds, 1, std::vector<int>{0}, 0.0);
  EXPECT_NEAR(s, 40 * std::log(1e-12), 1e-6);
  EXPECT_TRUE(std::isfinite(GaussianScorer(ds).local_score(1, std::vector<int>{0}, 0.0)));
}

// All DAGs on three labelled nodes, from the 27 ways of giving each pair no
// edge or one of two directions.
std::vector<std::vector<std::pair<int, int>>> all_three_node_dags() {
  const std::pair<int, int> pairs[3] = {{0, 1}, {0, 2}, {1, 2}};
  std::vector<std::vector<std::pair<int, int>>> out;
  for (int code = 0; code < 27; ++code) {
    std::vector<std::pair<int, int>> edges;
    int c = code;
    for (auto [a, b] : pairs) {
      if (c % 3 == 1) edges.emplace_back(a, b);
      if (c % 3 == 2) edges.emplace_back(b, a);
      c /= 3;
    }
    auto has = [&](int a, int b) { return std::count(edges.begin(), edges.end(), std::make_pair(a, b)) > 0; };
    const bool cyclic = (has(0, 1) && has(1, 2) && has(2, 0)) || (has(1, 0) && has(0, 2) && has(2, 1));
    if (!cyclic) out.push_back(edges);
  }
  return out;
}

// Refits every family by normal equations in long double.
long double refit_score(const Eigen::MatrixXd& x, const std::vector<std::pair<int, int>>& edges,
                        double lambda) {
  const int m = static_cast<int>(x.rows());
  long double total = 0;
  for (int child = 0; child < 3; ++child) {
    std::vector<int> pa;
    for (auto [a, b] : edges) {
      if (b == child) pa.push_back(a);
    }
    const int q = static_cast<int>(pa.size()) + 1;
    std::vector<std::vector<long double>> xtx(q, std::vector<long double>(q + 1, 0));
    for (int r = 0; r < m; ++r) {
      std::vector<long double> row{1.0L};
      for (int p : pa) row.push_back(x(r, p));
      for (int a = 0; a < q; ++a) {
        for (int b = 0; b < q; ++b) xtx[a][b] += row[a] * row[b];
        xtx[a][q] += row[a] * x(r, child);
      }
    }
    // Gauss-Jordan elimination.
    for (int col = 0; col < q; ++col) {
      int piv = col;
      for (int r = col + 1; r < q; ++r) {
        if (std::abs(xtx[r][col]) > std::abs(xtx[piv][col])) piv = r;
      }
      std::swap(xtx[col], xtx[piv]);
      for (int r = 0; r < q; ++r) {
        if (r == col) continue;
        const long double f = xtx[r][col] / xtx[col][col];
        for (int k = col; k <= q; ++k) xtx[r][k] -= f * xtx[col][k];
      }
    }
    long double rss = 0;
    for (int r = 0; r < m; ++r) {
      long double fit = xtx[0][q] / xtx[0][0];
      for (int k = 0; k < q - 1; ++k) fit += xtx[k + 1][q] / xtx[k + 1][k + 1] * x(r, pa[k]);
      rss += (x(r, child) - fit) * (x(r, child) - fit);
    }
    total += m * std::log(rss / m) + lambda * static_cast<long double>(pa.size());
  }
  return total;
}

TEST(LocalScore, TwentyFiveDagsMatchRefitOracle) {
  const auto dags = all_three_node_dags();
  ASSERT_EQ(dags.size(), 25u);
  const Eigen::MatrixXd x = testing::simulate_sem(3, {{0, 1, 0.8}, {1, 2, -0.6}}, {0, 1, 2}, 500, 21);
  const StaticDataset ds = testing::dataset(x);
  const GaussianScorer scorer(ds);
  const double lambda = std::log(500.0);
  for (const auto& edges : dags) {
    double total = 0.0;
    for (int child = 0; child < 3; ++child) {
      std::vector<int> pa;
      for (auto [a, b] : edges) {
        if (b == child) pa.push_back(a);
      }
      total += scorer.local_score(child, pa, lambda);
    }
    EXPECT_NEAR(total, static_cast<double>(refit_score(x, edges, lambda)), 1e-8);
  }
}

}  // namespace
}  // namespace pef
