#pragma once

#include <cstdint>
#include <optional>

#include "everlast/core.hpp"
#include "everlast/noise.hpp"

namespace everlast {

/// Answer caps at or above this value are reported as unbounded.
inline constexpr std::uint64_t kUnboundedCap = std::uint64_t{1} << 62;

/// floor((beta/4) exp(n tau^2 / 8)), evaluated in log space and saturated at
/// kUnboundedCap. Throws ConfigError when the cap is below one answer.
std::uint64_t round_cap(double tau, double beta, std::uint64_t n);

/// Natural log of the fractional cap (beta/4) exp(n tau^2/8).
double log_round_cap(double tau, double beta, std::uint64_t n);

struct RoundConfig {
  double tau;
  double beta;
  std::uint64_t n;
  double sigma2;       // vr_sigma2(tau, beta, n)
  double gamma;        // tau / 4
  std::uint64_t cap;   // floor(I), saturating

  static RoundConfig make(double tau, double beta, std::uint64_t n);
  [[nodiscard]] TruncGaussParams noise() const { return {sigma2, gamma}; }
};

struct RoundOutcome {
  bool answered = false;
  double answer = 0.0;  // valid when answered
  double noise = 0.0;   // xi drawn for this answer
  double mean_s = 0.0;  // E_S[q]
  double mean_t = 0.0;  // E_T[q]
  std::uint64_t index = 0;  // round-local query index i
  bool premature = false;   // valid when !answered
};

/// One validation round over a held pair (S, T) of equal size n.
///
/// A query is answered with E_S[q] + xi, xi ~ N(0, sigma2, [-tau/4, tau/4]),
/// while |E_S[q] - E_T[q]| <= tau/2 and the round-local index is within the
/// cap. Otherwise the round halts at that index (eta) and the query gets no
/// answer here; no noise is drawn for it.
class ValidationRound {
 public:
  ValidationRound(RoundConfig config, Dataset s, Dataset t);

  /// Throws UsageError if the round already halted.
  RoundOutcome answer(const Query& q, Rng& rng);

  [[nodiscard]] const RoundConfig& config() const noexcept { return config_; }
  [[nodiscard]] const Dataset& s() const noexcept { return s_; }
  [[nodiscard]] const Dataset& t() const noexcept { return t_; }
  [[nodiscard]] std::uint64_t answered() const noexcept { return next_index_ - 1; }
  [[nodiscard]] bool halted() const noexcept { return eta_.has_value(); }
  [[nodiscard]] std::optional<std::uint64_t> eta() const noexcept { return eta_; }
  /// Halted at an index within the cap (the agreement check failed).
  [[nodiscard]] bool premature() const noexcept { return premature_; }

 private:
  RoundConfig config_;
  Dataset s_;
  Dataset t_;
  std::uint64_t next_index_ = 1;
  std::optional<std::uint64_t> eta_;
  bool premature_ = false;
};

}  // namespace everlast
