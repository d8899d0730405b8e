#pragma once

#include <cmath>
#include <cstddef>

// Every numeric tolerance and statistical allowance used by the test suites
// and the harness lives here.
namespace everlast::tolerance {

/// Width, in standard deviations, of every binomial allowance.
inline constexpr double kBinomialSigmas = 3.0;

/// Absolute tolerance on ledger conservation and on the subsidy value.
inline constexpr double kLedgerAbs = 1e-9;

/// Relative tolerance when comparing a user's realized cost against the
/// closed-form low-price sum.
inline constexpr double kCostRel = 1e-9;

/// Absolute tolerance on a frozen cost value.
inline constexpr double kCostAbs = 1e-6;

/// Probability-table normalization tolerance.
inline constexpr double kProbSum = 1e-12;

/// Geometric schedule identities (sum of beta_t).
inline constexpr double kScheduleIdentity = 1e-12;

/// Test-level failure probability for Hoeffding-style concentration checks.
inline constexpr double kHoeffdingFailure = 1e-6;

/// Significance level of the Kolmogorov-Smirnov agreement check.
inline constexpr double kKsAlpha = 1e-4;

/// Upper limit on the count of "bad" trials: trials*p + sigmas*sqrt(trials*p*(1-p)).
inline double binomial_upper(std::size_t trials, double p, double sigmas = kBinomialSigmas) {
  const double n = static_cast<double>(trials);
  return n * p + sigmas * std::sqrt(n * p * (1.0 - p));
}

/// Lower limit on the count of "good" trials.
inline double binomial_lower(std::size_t trials, double p, double sigmas = kBinomialSigmas) {
  const double n = static_cast<double>(trials);
  return n * p - sigmas * std::sqrt(n * p * (1.0 - p));
}

/// Hoeffding deviation bound sqrt(ln(2/delta)/(2n)).
inline double hoeffding_radius(std::size_t n, double delta = kHoeffdingFailure) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

/// Two-sample Kolmogorov-Smirnov critical value at level alpha.
inline double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha = kKsAlpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

}  // namespace everlast::tolerance
