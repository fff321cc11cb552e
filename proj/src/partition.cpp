#include "pef/partition.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "pef/stats.hpp"

namespace pef {

namespace {

void check_dissimilarity(const Eigen::MatrixXd& d) {
  if (d.rows() != d.cols()) throw std::invalid_argument("dissimilarity matrix is not square");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) throw std::invalid_argument("dissimilarity diagonal must be zero");
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
      if (!(d(i, j) >= 0.0 && d(i, j) <= 1.0)) {
        throw std::invalid_argument("dissimilarity entries must lie in [0, 1]");
      }
      if (std::abs(d(i, j) - d(j, i)) > 1e-12) {
        throw std::invalid_argument("dissimilarity matrix is not symmetric");
      }
    }
  }
}

// Minimal union-find used to replay merges.
struct Forest {
  std::vector<int> parent;
  explicit Forest(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
};

}  // namespace

Dendrogram::Dendrogram(int n, std::vector<Merge> merges) : n_(n), merges_(std::move(merges)) {
  if (n_ < 1) throw std::invalid_argument("dendrogram needs at least one point");
  if (static_cast<int>(merges_.size()) != n_ - 1) {
    throw std::invalid_argument("dendrogram over " + std::to_string(n_) + " points needs " +
                                std::to_string(n_ - 1) + " merges");
  }
  std::vector<int> size(2 * n_ - 1, 0);
  std::fill(size.begin(), size.begin() + n_, 1);
  double last = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_ - 1; ++k) {
    const Merge& m = merges_[k];
    const int limit = n_ + k;
    if (m.left < 0 || m.right < 0 || m.left >= limit || m.right >= limit || m.left == m.right ||
        size[m.left] == 0 || size[m.right] == 0) {
      throw std::invalid_argument("merge " + std::to_string(k) + " does not join two live clusters");
    }
    if (m.height < last - 1e-12) throw std::invalid_argument("merge heights must be non-decreasing");
    last = std::max(last, m.height);
    size[limit] = size[m.left] + size[m.right];
    if (m.size != size[limit]) throw std::invalid_argument("merge size mismatch");
    size[m.left] = 0;
    size[m.right] = 0;
  }
}

std::vector<int> Dendrogram::labels_at(int level) const {
  if (level < 0 || level >= n_) throw std::out_of_range("dendrogram level");
  Forest forest(2 * n_ - 1);
  for (int k = 0; k < level; ++k) {
    forest.parent[merges_[k].left] = n_ + k;
    forest.parent[merges_[k].right] = n_ + k;
  }
  std::vector<int> root_label(2 * n_ - 1, -1);
  std::vector<int> labels(n_);
  int next = 0;
  for (int i = 0; i < n_; ++i) {
    const int root = forest.find(i);
    if (root_label[root] < 0) root_label[root] = next++;
    labels[i] = root_label[root];
  }
  return labels;
}

std::vector<int> Dendrogram::big_cluster_counts(int min_size) const {
  std::vector<int> size(2 * n_ - 1, 0);
  std::fill(size.begin(), size.begin() + n_, 1);
  std::vector<int> counts(n_);
  int big = min_size <= 1 ? n_ : 0;
  counts[0] = big;
  for (int k = 0; k < n_ - 1; ++k) {
    const Merge& m = merges_[k];
    const int a = size[m.left];
    const int b = size[m.right];
    big -= (a >= min_size) + (b >= min_size);
    big += (a + b >= min_size);
    size[n_ + k] = a + b;
    counts[k + 1] = big;
  }
  return counts;
}

Dendrogram average_linkage_hclust(const Eigen::MatrixXd& dissimilarity) {
  check_dissimilarity(dissimilarity);
  const int n = static_cast<int>(dissimilarity.rows());
  if (n < 1) throw std::invalid_argument("empty dissimilarity matrix");

  // Slot i holds the cluster whose smallest member is i; merged clusters keep
  // the lower slot. nn[i] caches the closest live slot above i.
  Eigen::MatrixXd d = dissimilarity;
  std::vector<char> alive(n, 1);
  std::vector<int> size(n, 1);
  std::vector<int> id(n);
  std::iota(id.begin(), id.end(), 0);
  std::vector<int> nn(n, -1);
  std::vector<double> nnd(n, std::numeric_limits<double>::infinity());

  auto rescan = [&](int i) {
    nn[i] = -1;
    nnd[i] = std::numeric_limits<double>::infinity();
    for (int k = i + 1; k < n; ++k) {
      if (alive[k] && d(i, k) < nnd[i]) {
        nnd[i] = d(i, k);
        nn[i] = k;
      }
    }
  };
  for (int i = 0; i < n; ++i) rescan(i);

  std::vector<Merge> merges;
  merges.reserve(n > 0 ? n - 1 : 0);
  for (int step = 0; step < n - 1; ++step) {
    int i = -1;
    for (int k = 0; k < n; ++k) {
      if (alive[k] && nn[k] >= 0 && (i < 0 || nnd[k] < nnd[i])) i = k;
    }
    const int j = nn[i];
    merges.push_back({id[i], id[j], nnd[i], size[i] + size[j]});

    const double wi = size[i];
    const double wj = size[j];
    for (int k = 0; k < n; ++k) {
      if (!alive[k] || k == i || k == j) continue;
      const double v = (wi * d(i, k) + wj * d(j, k)) / (wi + wj);
      d(i, k) = v;
      d(k, i) = v;
    }
    size[i] += size[j];
    id[i] = n + step;
    alive[j] = 0;
    nn[j] = -1;

    rescan(i);
    for (int k = 0; k < j; ++k) {
      if (!alive[k] || k == i) continue;
      if (nn[k] == i || nn[k] == j) {
        rescan(k);
      } else if (k < i && (d(k, i) < nnd[k] || (d(k, i) == nnd[k] && i < nn[k]))) {
        nnd[k] = d(k, i);
        nn[k] = i;
      }
    }
  }
  return Dendrogram(n, std::move(merges));
}

int big_cluster_threshold(int n) { return std::max(1, (5 * n + 99) / 100); }

ClusterCount choose_p(const Dendrogram& dendrogram, int n, int p_max) {
  if (p_max < 1) throw std::invalid_argument("p_max must be at least 1");
  if (n != dendrogram.point_count()) throw std::invalid_argument("dendrogram size mismatch");
  const std::vector<int> counts = dendrogram.big_cluster_counts(big_cluster_threshold(n));
  ClusterCount out;
  out.p = std::min(p_max, *std::max_element(counts.begin(), counts.end()));
  for (int i = n - 1; i >= 0; --i) {
    if (counts[i] == out.p) {
      out.level = i;
      break;
    }
  }
  return out;
}

ClusterAssignment modified_hclust(const Eigen::MatrixXd& dissimilarity, int p_max) {
  const Dendrogram dend = average_linkage_hclust(dissimilarity);
  const int n = dend.point_count();
  const ClusterCount cut = choose_p(dend, n, p_max);

  const std::vector<int> level_labels = dend.labels_at(cut.level);
  const int count = *std::max_element(level_labels.begin(), level_labels.end()) + 1;
  std::vector<std::vector<int>> clusters(count);
  for (int i = 0; i < n; ++i) clusters[level_labels[i]].push_back(i);
  // Largest first; members are ascending so front() breaks ties.
  std::stable_sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });

  // Pairwise sums of point dissimilarities between clusters; average linkage
  // is sum / (|a| |b|). Slots keep their order: the first p are never removed.
  const int c = count;
  Eigen::MatrixXd per_point(n, c);
  for (int b = 0; b < c; ++b) {
    for (int u = 0; u < n; ++u) {
      double s = 0.0;
      for (int v : clusters[b]) s += dissimilarity(u, v);
      per_point(u, b) = s;
    }
  }
  Eigen::MatrixXd sums(c, c);
  for (int a = 0; a < c; ++a) {
    for (int b = 0; b < c; ++b) {
      double s = 0.0;
      for (int u : clusters[a]) s += per_point(u, b);
      sums(a, b) = s;
    }
  }
  std::vector<char> alive(c, 1);
  std::vector<double> weight(c);
  for (int a = 0; a < c; ++a) weight[a] = static_cast<double>(clusters[a].size());
  auto linkage = [&](int a, int b) { return sums(a, b) / (weight[a] * weight[b]); };

  // best[j] = closest live slot below j, for every small slot j >= p.
  const int p = cut.p;
  std::vector<int> best(c, -1);
  auto rescan = [&](int j) {
    best[j] = -1;
    for (int i = 0; i < j; ++i) {
      if (alive[i] && (best[j] < 0 || linkage(i, j) < linkage(best[j], j))) best[j] = i;
    }
  };
  for (int j = p; j < c; ++j) rescan(j);

  for (int live = c; live > p; --live) {
    int js = -1;
    for (int j = p; j < c; ++j) {
      if (!alive[j] || best[j] < 0) continue;
      if (js < 0) {
        js = j;
        continue;
      }
      const double cand = linkage(best[j], j);
      const double cur = linkage(best[js], js);
      if (cand < cur || (cand == cur && best[j] < best[js])) js = j;
    }
    const int is = best[js];

    clusters[is].insert(clusters[is].end(), clusters[js].begin(), clusters[js].end());
    clusters[js].clear();
    for (int k = 0; k < c; ++k) {
      sums(is, k) += sums(js, k);
      sums(k, is) = sums(is, k);
    }
    weight[is] += weight[js];
    alive[js] = 0;
    best[js] = -1;

    if (is >= p) rescan(is);
    for (int j = std::max(p, is + 1); j < c; ++j) {
      if (!alive[j]) continue;
      if (best[j] == is || best[j] == js) {
        rescan(j);
      } else if (best[j] >= 0) {
        const double v = linkage(is, j);
        const double cur = linkage(best[j], j);
        if (v < cur || (v == cur && is < best[j])) best[j] = is;
      }
    }
  }

  std::vector<int> labels(n, -1);
  int next = 0;
  for (int a = 0; a < c; ++a) {
    if (!alive[a]) continue;
    for (int u : clusters[a]) labels[u] = next;
    ++next;
  }
  return ClusterAssignment(std::move(labels));
}

ClusterAssignment mhc(const StaticDataset& ds, int p_max) {
  return mhc(correlation_matrix(ds), p_max);
}

ClusterAssignment mhc(const CorrelationMatrix& corr, int p_max) {
  return modified_hclust(dissimilarity(corr), p_max);
}

}  // namespace pef
