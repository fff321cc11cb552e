#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pef {

// m sequences of l slices over the same n variables. Values are stored
// sequence-major, then slice, then variable.
class TimeSeriesDataset {
 public:
  TimeSeriesDataset() = default;
  // Throws pef::DataError on size mismatch or non-finite values.
  TimeSeriesDataset(int sequences, int length, std::vector<std::string> names,
                    std::vector<double> values);

  int sequences() const { return sequences_; }
  int length() const { return length_; }
  int variables() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& values() const { return values_; }

  double at(int seq, int slice, int var) const {
    return values_[(static_cast<std::size_t>(seq) * length_ + slice) * names_.size() + var];
  }
  std::span<const double> slice(int seq, int t) const;

  bool operator==(const TimeSeriesDataset&) const = default;

 private:
  int sequences_ = 0;
  int length_ = 0;
  std::vector<std::string> names_;
  std::vector<double> values_;
};

// Plain rows x columns matrix of observations with named columns. Columns
// flagged constant carry no information and are treated as independent of
// everything by the statistics layer.
class StaticDataset {
 public:
  StaticDataset() = default;
  // Throws pef::DataError on duplicate names, dimension mismatch or
  // non-finite entries.
  StaticDataset(Eigen::MatrixXd values, std::vector<std::string> names,
                std::vector<bool> constant = {});

  int rows() const { return static_cast<int>(values_.rows()); }
  int cols() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& names() const { return names_; }
  bool is_constant(int col) const { return constant_[col]; }
  const std::vector<bool>& constant_flags() const { return constant_; }

  // Column restriction, in the order given.
  StaticDataset select_columns(std::span<const int> cols) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
  std::vector<bool> constant_;
};

// Slice-0 observations: one row per sequence.
StaticDataset extract_initial(const TimeSeriesDataset& ts);

// Adjacent-slice pairs: one row per (sequence, t) for t < l-1, sequence-major.
// Columns are the n variables suffixed "_t" followed by the same variables
// suffixed "_t1".
StaticDataset extract_transitions(const TimeSeriesDataset& ts);

// Centres every column and scales it to unit sample standard deviation
// (n-1 denominator). Constant columns become all-zero and are flagged.
StaticDataset standardize(const StaticDataset& ds);

// Same transformation applied per variable over all (sequence, slice) cells.
TimeSeriesDataset standardize(const TimeSeriesDataset& ts);

inline constexpr const char* kPastSuffix = "_t";
inline constexpr const char* kFutureSuffix = "_t1";

}  // namespace pef
