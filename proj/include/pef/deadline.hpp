#pragma once

#include <chrono>
#include <optional>

#include "pef/errors.hpp"

namespace pef {

// Wall-clock budget shared by the long-running stages.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;
  explicit Deadline(std::chrono::duration<double> budget)
      : at_(Clock::now() + std::chrono::duration_cast<Clock::duration>(budget)) {}

  bool expired() const { return at_ && Clock::now() >= *at_; }
  void check() const {
    if (expired()) throw TimeoutError("time budget exhausted");
  }

 private:
  std::optional<Clock::time_point> at_;
};

}  // namespace pef
