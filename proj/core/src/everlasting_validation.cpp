#include "everlast/everlasting_validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "everlast/errors.hpp"

namespace everlast {

void MechanismConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0,1)");
  if (!(sample_unit_cost > 0.0) || !std::isfinite(sample_unit_cost)) {
    throw ConfigError("sample_unit_cost must be > 0");
  }
}

double initial_budget(double tau, double beta) {
  MechanismConfig{tau, beta}.validate();
  return 36.0 * std::log(8.0 / beta) / (tau * tau);
}

std::uint64_t initial_round_size(double tau, double beta) {
  return static_cast<std::uint64_t>(std::ceil(initial_budget(tau, beta) / 2.0));
}

double low_price(double tau, std::uint64_t i) {
  if (i == 0) throw ConfigError("low_price: query index starts at 1");
  return 96.0 / (tau * tau * static_cast<double>(i));
}

WideCount ev_round_size(std::uint64_t n0, unsigned t) {
  WideCount n = n0;
  constexpr WideCount kMax = ~WideCount{0};
  for (unsigned k = 0; k < t; ++k) {
    if (n > kMax / 3) throw ConfigError("round size 3^t N_0 overflows 128 bits");
    n *= 3;
  }
  return n;
}

double ev_round_beta(double beta, unsigned t) { return std::ldexp(beta / 2.0, -static_cast<int>(t)); }

double low_price_total_bound(double tau, std::uint64_t m) {
  if (m == 0) return 0.0;
  return 96.0 / (tau * tau) * (1.0 + std::log(static_cast<double>(m)));
}

std::string to_string(EvEventKind kind) {
  switch (kind) {
    case EvEventKind::kAnswered: return "answered";
    case EvEventKind::kHalted: return "halted";
    case EvEventKind::kPurchased: return "purchased";
  }
  return "unknown";
}

nlohmann::json to_json(const EvEvent& e) {
  nlohmann::json j;
  j["event"] = to_string(e.kind);
  j["i"] = e.i;
  j["t"] = e.t;
  j["a"] = e.a ? nlohmann::json(*e.a) : nlohmann::json(nullptr);
  j["p"] = e.p;
  j["N_t"] = e.n_t;
  j["capital"] = e.capital;
  return j;
}

EverlastingValidation::EverlastingValidation(MechanismConfig config, std::shared_ptr<const Distribution> dist,
                                             Rng& rng)
    : config_(config), dist_(std::move(dist)), ledger_(config.sample_unit_cost) {
  config_.validate();
  if (!dist_) throw ConfigError("mechanism needs a distribution");
  gamma_ = initial_budget(config_.tau, config_.beta);
  n0_ = initial_round_size(config_.tau, config_.beta);
  if (static_cast<double>(n0_) < 18.0 * std::log(2.0) / (config_.tau * config_.tau)) {
    throw ConfigError("N_0 below 18 ln 2 / tau^2");
  }
  n_t_ = n0_;
  beta_t_ = ev_round_beta(config_.beta, 0);
  try {
    (void)round_cap(config_.tau, beta_t_, n0_);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("round 0 infeasible: ") + e.what());
  }
  const double first_cost = 2.0 * static_cast<double>(n0_) * config_.sample_unit_cost;
  const double subsidy = gamma_ * config_.sample_unit_cost;
  ledger_.seed(subsidy, std::max(0.0, first_cost - subsidy));
  start_round(n0_, beta_t_, rng);
}

void EverlastingValidation::start_round(std::uint64_t n, double beta, Rng& rng) {
  if (n > kMaxDatasetSize) throw ConfigError("round dataset size " + std::to_string(n) + " exceeds simulator limit");
  ledger_.purchase(t_, 2 * n);
  auto s = sample_dataset(*dist_, n, rng);
  auto t = sample_dataset(*dist_, n, rng);
  round_ = std::make_unique<ValidationRound>(RoundConfig::make(config_.tau, beta, n), std::move(s), std::move(t));
  events_.push_back({EvEventKind::kPurchased, next_i_, t_, std::nullopt, 0.0, n, ledger_.capital(), false, true});
}

EvSubmission EverlastingValidation::submit(const Query& q, Rng& rng) {
  EvSubmission out;
  out.index = next_i_;
  CompensatedSum price;
  for (;;) {
    const auto r = round_->answer(q, rng);
    if (r.answered) {
      const bool resubmitted = out.halts > 0;
      const double low = (resubmitted && !config_.charge_low_price_on_resubmit) ? 0.0 : low_price(config_.tau, next_i_);
      ledger_.collect(low);
      price.add(low);
      out.low_charge = low;
      out.answer = r.answer;
      out.noise = r.noise;
      out.mean_s = r.mean_s;
      out.mean_t = r.mean_t;
      out.round = t_;
      if (round_->answered() > round_->config().cap) ++cap_overruns_;
      events_.push_back({EvEventKind::kAnswered, next_i_, t_, r.answer, low, n_t_, ledger_.capital(), false, true});
      ++next_i_;
      break;
    }

    const double need = 6.0 * static_cast<double>(n_t_) * config_.sample_unit_cost;
    bool lemma_ok = true;
    if (r.premature) {
      ++premature_halts_;
      ++out.premature_halts;
    } else {
      ++natural_ends_;
      lemma_ok = ledger_.capital() >= need;
      if (!lemma_ok) ++lemma_failures_;
    }
    const double high = ledger_.top_up_to(need);
    price.add(high);
    out.high_charge += high;
    ++out.halts;
    events_.push_back({EvEventKind::kHalted, next_i_, t_, std::nullopt, high, n_t_, ledger_.capital(), r.premature,
                       lemma_ok});

    released_.push_back(round_->s());
    released_.push_back(round_->t());
    const WideCount next = ev_round_size(n_t_, 1);
    if (next > kMaxDatasetSize) throw ConfigError("round dataset size exceeds simulator limit");
    n_t_ = static_cast<std::uint64_t>(next);
    beta_t_ /= 2.0;
    ++t_;
    start_round(n_t_, beta_t_, rng);
  }
  out.price = price.value();
  return out;
}

std::vector<EvEvent> EverlastingValidation::take_events() {
  std::vector<EvEvent> out;
  out.swap(events_);
  return out;
}

}  // namespace everlast
