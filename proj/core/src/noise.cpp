#include "everlast/noise.hpp"

#include <cmath>
#include <random>
#include <string>

#include "everlast/errors.hpp"

namespace everlast {

TruncGaussParams TruncGaussParams::make(double sigma2, double gamma) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("truncated Gaussian needs sigma2 > 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("truncated Gaussian needs gamma > 0");
  return {sigma2, gamma};
}

LaplaceParams LaplaceParams::make(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("Laplace scale must be > 0");
  return {scale};
}

double sample_trunc_gauss(const TruncGaussParams& p, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(p.sigma2));
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const double z = normal(rng);
    if (std::abs(z) <= p.gamma) return z;
  }
  throw SamplingError("truncated Gaussian: no acceptance in " + std::to_string(kMaxRejections) +
                      " draws (gamma/sigma = " + std::to_string(p.gamma / std::sqrt(p.sigma2)) + ")");
}

double sample_laplace(const LaplaceParams& p, Rng& rng) {
  // u in (-1/2, 1/2); open_unit excludes 0 so |u| < 1/2 strictly.
  const double u = open_unit(rng) - 0.5;
  const double mag = -p.scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

double trunc_gauss_acceptance(const TruncGaussParams& p) {
  return std::erf(p.gamma / std::sqrt(2.0 * p.sigma2));
}

double vr_sigma2(double tau, double beta, std::uint64_t n) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("vr_sigma2: tau must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("vr_sigma2: beta must lie in (0,1)");
  if (n < 2) throw ConfigError("vr_sigma2: n must be >= 2");
  const double dn = static_cast<double>(n);
  // ln(8 n^2 / beta) = ln 8 + 2 ln n - ln beta, stable for large n.
  const double log_term = std::log(8.0) + 2.0 * std::log(dn) - std::log(beta);
  return tau * tau / (32.0 * log_term);
}

}  // namespace everlast
