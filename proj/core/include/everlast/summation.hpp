#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace everlast {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double initial) : sum_(initial) {}

  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

  /// Replace the running value (drops the carry).
  void reset(double value) noexcept {
    sum_ = value;
    carry_ = 0.0;
  }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Compensated sum over four interleaved lanes (keeps the add latency chain
/// short), combined in a fixed order so the result is deterministic.
inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum lane[4];
  std::size_t i = 0;
  for (; i + 4 <= xs.size(); i += 4) {
    lane[0].add(xs[i]);
    lane[1].add(xs[i + 1]);
    lane[2].add(xs[i + 2]);
    lane[3].add(xs[i + 3]);
  }
  for (; i < xs.size(); ++i) lane[0].add(xs[i]);
  CompensatedSum total;
  for (const auto& l : lane) total.add(l.value());
  return total.value();
}

}  // namespace everlast
