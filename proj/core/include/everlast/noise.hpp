#pragma once

#include <cstdint>

#include "everlast/rng.hpp"

namespace everlast {

/// N(0, sigma2) conditioned on |x| <= gamma.
struct TruncGaussParams {
  double sigma2;
  double gamma;

  /// Throws ConfigError unless sigma2 > 0 and gamma > 0.
  static TruncGaussParams make(double sigma2, double gamma);
};

/// Laplace(0, scale): density exp(-|x|/scale) / (2 scale).
struct LaplaceParams {
  double scale;

  static LaplaceParams make(double scale);
};

/// Rejection attempts before sample_trunc_gauss gives up.
inline constexpr int kMaxRejections = 1000;

/// Draws Z ~ N(0, sigma2) until |Z| <= gamma. Throws SamplingError after
/// kMaxRejections failed attempts.
double sample_trunc_gauss(const TruncGaussParams& p, Rng& rng);

/// Inverse-CDF draw: x = -b * sgn(u) * ln(1 - 2|u|), u ~ U(-1/2, 1/2).
double sample_laplace(const LaplaceParams& p, Rng& rng);

/// P(|Z| <= gamma) for Z ~ N(0, sigma2); the rejection sampler's acceptance rate.
double trunc_gauss_acceptance(const TruncGaussParams& p);

/// Noise variance of a validation round: tau^2 / (32 ln(8 n^2 / beta)).
/// Requires 0 < tau < 1, 0 < beta < 1, n >= 2.
double vr_sigma2(double tau, double beta, std::uint64_t n);

}  // namespace everlast
