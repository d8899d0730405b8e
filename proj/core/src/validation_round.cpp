#include "everlast/validation_round.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "everlast/errors.hpp"

namespace everlast {

double log_round_cap(double tau, double beta, std::uint64_t n) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("round cap: tau must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("round cap: beta must lie in (0,1)");
  if (n == 0) throw ConfigError("round cap: n must be >= 1");
  return std::log(beta / 4.0) + static_cast<double>(n) * tau * tau / 8.0;
}

std::uint64_t round_cap(double tau, double beta, std::uint64_t n) {
  const double log_cap = log_round_cap(tau, beta, n);
  if (log_cap >= std::log(static_cast<double>(kUnboundedCap))) return kUnboundedCap;
  const double real_cap = std::exp(log_cap);
  // An I that is an integer up to rounding in the log/exp round trip counts
  // as that integer.
  const double nearest = std::round(real_cap);
  const double cap = std::abs(real_cap - nearest) <= 1e-12 * std::max(1.0, nearest) ? nearest : std::floor(real_cap);
  if (cap < 1.0) {
    throw ConfigError("round cap I = " + std::to_string(std::exp(log_cap)) + " < 1 for tau=" +
                      std::to_string(tau) + ", beta=" + std::to_string(beta) + ", n=" + std::to_string(n) +
                      "; the round could answer nothing");
  }
  return static_cast<std::uint64_t>(cap);
}

RoundConfig RoundConfig::make(double tau, double beta, std::uint64_t n) {
  RoundConfig c{};
  c.tau = tau;
  c.beta = beta;
  c.n = n;
  c.sigma2 = vr_sigma2(tau, beta, n);
  c.gamma = tau / 4.0;
  c.cap = round_cap(tau, beta, n);
  return c;
}

ValidationRound::ValidationRound(RoundConfig config, Dataset s, Dataset t)
    : config_(config), s_(std::move(s)), t_(std::move(t)) {
  if (s_.size() != config_.n || t_.size() != config_.n) {
    throw ConfigError("validation round needs |S| = |T| = n = " + std::to_string(config_.n));
  }
  if (!s_.domain()->same_as(*t_.domain())) throw ConfigError("validation round: S and T domains differ");
}

RoundOutcome ValidationRound::answer(const Query& q, Rng& rng) {
  if (halted()) throw UsageError("validation round already halted at query " + std::to_string(*eta_));
  RoundOutcome out;
  out.index = next_index_;
  out.mean_s = empirical_mean(q, s_);
  out.mean_t = empirical_mean(q, t_);
  const bool agree = std::abs(out.mean_s - out.mean_t) <= config_.tau / 2.0;
  if (agree && next_index_ <= config_.cap) {
    out.noise = sample_trunc_gauss(config_.noise(), rng);
    assert(std::abs(out.noise) <= config_.gamma);
    out.answer = out.mean_s + out.noise;
    out.answered = true;
    ++next_index_;
    return out;
  }
  eta_ = next_index_;
  premature_ = next_index_ <= config_.cap;
  out.premature = premature_;
  return out;
}

}  // namespace everlast
