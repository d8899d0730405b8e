#include "everlast/thresholdout.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "everlast/errors.hpp"

namespace everlast {

double ThresholdoutConfig::m() const { return std::exp(log_m); }

ThresholdoutConfig to_config(double tau, double beta, double m, std::uint64_t budget) {
  if (!(m >= 1.0) || !std::isfinite(m)) throw ConfigError("thresholdout: m must be >= 1");
  return to_config_log(tau, beta, std::log(m), budget);
}

ThresholdoutConfig to_config_log(double tau, double beta, double log_m, std::uint64_t budget) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("thresholdout: tau must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("thresholdout: beta must lie in (0,1)");
  if (!(log_m >= 0.0) || !std::isfinite(log_m)) throw ConfigError("thresholdout: m must be >= 1");
  if (budget < 1) throw ConfigError("thresholdout: budget B must be >= 1");
  if (std::log(static_cast<double>(budget)) > log_m + 1e-12) throw ConfigError("thresholdout: budget B exceeds m");

  ThresholdoutConfig c;
  c.tau = tau;
  c.beta = beta;
  c.log_m = log_m;
  c.budget = budget;
  c.zeta = 3.0 * tau / 4.0;
  // ln(4m/beta) = ln 4 + ln m - ln beta
  const double log_4m_beta = std::log(4.0) + log_m - std::log(beta);
  c.sigma = tau / (48.0 * log_4m_beta);

  const double tau2 = tau * tau;
  const double b = static_cast<double>(budget);
  const double ln208 = std::log(208.0 / tau);
  auto& f = c.feasibility;
  f.pure_dp_min_n = 768.0 * b * log_4m_beta / tau2;
  f.approx_dp_term_sqrt = 9984.0 * log_4m_beta * std::sqrt(32.0 * b * std::log(1664.0 * ln208 / (beta * tau))) / tau2;
  f.approx_dp_term_log = 21632.0 * std::log(6656.0 * ln208 / (beta * tau)) / tau2;
  f.approx_dp_min_n = std::max(f.approx_dp_term_sqrt, f.approx_dp_term_log);
  // 2 exp(-tau^2 n / 8) <= beta / (4m)  <=>  n >= 8 (ln 8 + ln m - ln beta) / tau^2
  f.nonadaptive_min_n = 8.0 * (std::log(8.0) + log_m - std::log(beta)) / tau2;
  return c;
}

nlohmann::json to_json(const ThresholdoutConfig& c) {
  const auto& f = c.feasibility;
  return {
      {"tau", c.tau},
      {"beta", c.beta},
      {"log_m", c.log_m},
      {"B", c.budget},
      {"zeta", c.zeta},
      {"sigma", c.sigma},
      {"pure_dp_min_n", f.pure_dp_min_n},
      {"approx_dp_min_n", f.approx_dp_min_n},
      {"approx_dp_term_sqrt", f.approx_dp_term_sqrt},
      {"approx_dp_term_log", f.approx_dp_term_log},
      {"nonadaptive_min_n", f.nonadaptive_min_n},
  };
}

Thresholdout::Thresholdout(ThresholdoutConfig config, Dataset s, Dataset t, Rng& rng)
    : config_(config), s_(std::move(s)), t_(std::move(t)), budget_(config.budget) {
  if (s_.size() != t_.size()) throw ConfigError("thresholdout: S and T must have equal size");
  if (!s_.domain()->same_as(*t_.domain())) throw ConfigError("thresholdout: S and T domains differ");
  rho_ = sample_laplace(LaplaceParams::make(2.0 * config_.sigma), rng);
}

ThresholdoutAnswer Thresholdout::answer(const Query& q, Rng& rng) {
  if (halted()) throw UsageError("thresholdout halted: overfitting budget exhausted");
  ThresholdoutAnswer out;
  out.mean_s = empirical_mean(q, s_);
  out.mean_t = empirical_mean(q, t_);
  out.rho = rho_;
  out.lambda = sample_laplace(LaplaceParams::make(4.0 * config_.sigma), rng);
  ++answered_;
  if (std::abs(out.mean_s - out.mean_t) > config_.zeta + rho_ + out.lambda) {
    out.xi = sample_laplace(LaplaceParams::make(config_.sigma), rng);
    rho_ = sample_laplace(LaplaceParams::make(2.0 * config_.sigma), rng);
    --budget_;
    ++above_;
    out.above = true;
    out.answer = out.mean_t + out.xi;
    return out;
  }
  out.answer = out.mean_s;
  return out;
}

}  // namespace everlast
