#include "pef/data.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "pef/errors.hpp"

namespace pef {

TimeSeriesDataset::TimeSeriesDataset(int sequences, int length, std::vector<std::string> names,
                                     std::vector<double> values)
    : sequences_(sequences), length_(length), names_(std::move(names)), values_(std::move(values)) {
  if (sequences_ < 0 || length_ < 0) throw DataError("negative time-series dimensions");
  const std::size_t expected = static_cast<std::size_t>(sequences_) * length_ * names_.size();
  if (values_.size() != expected) {
    throw DataError("time series holds " + std::to_string(values_.size()) + " values, expected " +
                    std::to_string(expected));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DataError("time series contains a non-finite value");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) throw DataError("duplicate variable name '" + name + "'");
  }
}

std::span<const double> TimeSeriesDataset::slice(int seq, int t) const {
  const std::size_t n = names_.size();
  return {values_.data() + (static_cast<std::size_t>(seq) * length_ + t) * n, n};
}

StaticDataset::StaticDataset(Eigen::MatrixXd values, std::vector<std::string> names,
                             std::vector<bool> constant)
    : values_(std::move(values)), names_(std::move(names)), constant_(std::move(constant)) {
  if (static_cast<std::size_t>(values_.cols()) != names_.size()) {
    throw DataError("dataset has " + std::to_string(values_.cols()) + " columns but " +
                    std::to_string(names_.size()) + " names");
  }
  if (constant_.empty()) constant_.assign(names_.size(), false);
  if (constant_.size() != names_.size()) throw DataError("constant-flag count mismatch");
  if (!values_.allFinite()) throw DataError("dataset contains a non-finite value");
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) throw DataError("duplicate column name '" + name + "'");
  }
}

StaticDataset StaticDataset::select_columns(std::span<const int> cols) const {
  Eigen::MatrixXd sub(values_.rows(), static_cast<Eigen::Index>(cols.size()));
  std::vector<std::string> names;
  std::vector<bool> constant;
  names.reserve(cols.size());
  constant.reserve(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    sub.col(static_cast<Eigen::Index>(k)) = values_.col(cols[k]);
    names.push_back(names_.at(cols[k]));
    constant.push_back(constant_.at(cols[k]));
  }
  return {std::move(sub), std::move(names), std::move(constant)};
}

StaticDataset extract_initial(const TimeSeriesDataset& ts) {
  if (ts.sequences() < 1 || ts.length() < 1 || ts.variables() < 1) {
    throw DataError("empty time-series dataset");
  }
  const int n = ts.variables();
  Eigen::MatrixXd out(ts.sequences(), n);
  for (int k = 0; k < ts.sequences(); ++k) {
    auto row = ts.slice(k, 0);
    for (int v = 0; v < n; ++v) out(k, v) = row[v];
  }
  return {std::move(out), ts.names()};
}

StaticDataset extract_transitions(const TimeSeriesDataset& ts) {
  if (ts.length() < 2) throw DataError("transition extraction needs sequences of length >= 2");
  if (ts.sequences() < 1 || ts.variables() < 1) throw DataError("empty time-series dataset");
  const int n = ts.variables();
  const int per_seq = ts.length() - 1;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ts.sequences()) * per_seq, 2 * n);
  Eigen::Index r = 0;
  for (int k = 0; k < ts.sequences(); ++k) {
    for (int t = 0; t < per_seq; ++t, ++r) {
      auto now = ts.slice(k, t);
      auto next = ts.slice(k, t + 1);
      for (int v = 0; v < n; ++v) {
        out(r, v) = now[v];
        out(r, n + v) = next[v];
      }
    }
  }
  std::vector<std::string> names;
  names.reserve(2 * n);
  for (const auto& name : ts.names()) names.push_back(name + kPastSuffix);
  for (const auto& name : ts.names()) names.push_back(name + kFutureSuffix);
  return {std::move(out), std::move(names)};
}

namespace {

// Mean and sample sd of a strided sequence; two passes for accuracy.
struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

template <typename Get>
Moments moments(std::size_t count, Get get) {
  Moments m;
  for (std::size_t i = 0; i < count; ++i) m.mean += get(i);
  m.mean /= static_cast<double>(count);
  double ss = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = get(i) - m.mean;
    ss += d * d;
  }
  m.sd = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
  return m;
}

// Relative threshold below which a column is treated as constant.
bool degenerate(const Moments& m) { return !(m.sd > 1e-12 * std::max(1.0, std::abs(m.mean))); }

}  // namespace

StaticDataset standardize(const StaticDataset& ds) {
  if (ds.rows() < 2) throw DataError("standardize needs at least 2 rows");
  Eigen::MatrixXd out = ds.values();
  std::vector<bool> constant(ds.cols(), false);
  for (int c = 0; c < ds.cols(); ++c) {
    auto col = out.col(c);
    const Moments m = moments(static_cast<std::size_t>(col.size()),
                              [&](std::size_t i) { return col(static_cast<Eigen::Index>(i)); });
    if (degenerate(m)) {
      col.setZero();
      constant[c] = true;
    } else {
      col = (col.array() - m.mean) / m.sd;
    }
  }
  return {std::move(out), ds.names(), std::move(constant)};
}

TimeSeriesDataset standardize(const TimeSeriesDataset& ts) {
  const std::size_t n = static_cast<std::size_t>(ts.variables());
  const std::size_t cells = static_cast<std::size_t>(ts.sequences()) * ts.length();
  if (cells < 2) throw DataError("standardize needs at least 2 observations per variable");
  std::vector<double> values = ts.values();
  for (std::size_t v = 0; v < n; ++v) {
    const Moments m = moments(cells, [&](std::size_t i) { return values[i * n + v]; });
    const bool flat = degenerate(m);
    for (std::size_t i = 0; i < cells; ++i) {
      double& x = values[i * n + v];
      x = flat ? 0.0 : (x - m.mean) / m.sd;
    }
  }
  return {ts.sequences(), ts.length(), ts.names(), std::move(values)};
}

}  // namespace pef
