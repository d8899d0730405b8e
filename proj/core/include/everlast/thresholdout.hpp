#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "everlast/core.hpp"
#include "everlast/noise.hpp"

namespace everlast {

/// Sample-size thresholds under which the Thresholdout accuracy guarantee
/// holds. They are reported, never enforced.
struct ThresholdoutFeasibility {
  /// 768 B ln(4m/beta) / tau^2
  double pure_dp_min_n = 0.0;
  /// 9984 ln(4m/beta) sqrt(32 B ln(1664 ln(208/tau) / (beta tau))) / tau^2
  double approx_dp_term_sqrt = 0.0;
  /// 21632 ln(6656 ln(208/tau) / (beta tau)) / tau^2
  double approx_dp_term_log = 0.0;
  /// max of the two approximate-DP terms
  double approx_dp_min_n = 0.0;
  /// Smallest n with 2 exp(-tau^2 n / 8) <= beta / (4m): every non-adaptive
  /// query then stays within tau/4 on both halves with the stated probability.
  double nonadaptive_min_n = 0.0;

  [[nodiscard]] bool meets_pure(double n) const { return n >= pure_dp_min_n; }
  [[nodiscard]] bool meets_approx(double n) const { return n >= approx_dp_min_n; }
  [[nodiscard]] bool meets_either(double n) const { return meets_pure(n) || meets_approx(n); }
  [[nodiscard]] bool meets_nonadaptive(double n) const { return n >= nonadaptive_min_n; }
};

struct ThresholdoutConfig {
  double tau = 0.0;
  double beta = 0.0;
  double log_m = 0.0;          // ln of the total query allotment m
  std::uint64_t budget = 0;    // overfitting budget B
  double zeta = 0.0;           // 3 tau / 4
  double sigma = 0.0;          // tau / (48 ln(4m / beta))
  ThresholdoutFeasibility feasibility;

  [[nodiscard]] double m() const;
};

/// Parameters for allotment m and budget B. Requires 0 < tau, beta < 1 and
/// 1 <= B <= m.
ThresholdoutConfig to_config(double tau, double beta, double m, std::uint64_t budget);
/// Same, with m given as ln m (for allotments beyond double range).
ThresholdoutConfig to_config_log(double tau, double beta, double log_m, std::uint64_t budget);

nlohmann::json to_json(const ThresholdoutConfig& c);

struct ThresholdoutAnswer {
  double answer = 0.0;
  bool above = false;     // true: the threshold was crossed (top), false: bottom
  double mean_s = 0.0;
  double mean_t = 0.0;
  double xi = 0.0;        // Laplace noise added to E_T on top answers
  double lambda = 0.0;    // per-query threshold noise
  double rho = 0.0;       // threshold perturbation in force for this query
};

/// Laplace-noise holdout with an overfitting budget.
///
/// rho ~ Lap(2 sigma) is drawn at construction and redrawn after each top
/// answer. Each query draws lambda ~ Lap(4 sigma); if |E_S - E_T| > zeta +
/// rho + lambda the answer is E_T + Lap(sigma) and the budget drops by one,
/// otherwise the answer is E_S exactly. Halts once the budget is below one.
/// The allotment m only sets sigma; enforcing it is the caller's job.
class Thresholdout {
 public:
  Thresholdout(ThresholdoutConfig config, Dataset s, Dataset t, Rng& rng);

  /// Throws UsageError once halted.
  ThresholdoutAnswer answer(const Query& q, Rng& rng);

  [[nodiscard]] bool halted() const noexcept { return budget_ < 1; }
  [[nodiscard]] std::uint64_t remaining_budget() const noexcept { return budget_; }
  [[nodiscard]] std::uint64_t answered() const noexcept { return answered_; }
  [[nodiscard]] std::uint64_t above_count() const noexcept { return above_; }
  [[nodiscard]] double rho() const noexcept { return rho_; }
  [[nodiscard]] const ThresholdoutConfig& config() const noexcept { return config_; }
  [[nodiscard]] const Dataset& s() const noexcept { return s_; }
  [[nodiscard]] const Dataset& t() const noexcept { return t_; }

 private:
  ThresholdoutConfig config_;
  Dataset s_;
  Dataset t_;
  std::uint64_t budget_;
  double rho_;
  std::uint64_t answered_ = 0;
  std::uint64_t above_ = 0;
};

}  // namespace everlast
