#include "everlast/everlasting_to.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "everlast/errors.hpp"
#include "everlast/everlasting_validation.hpp"
#include "everlast/tolerances.hpp"
#include "everlast/validation_round.hpp"

namespace everlast {

namespace {

constexpr double kE = std::numbers::e;

void check_common(double tau, double beta, double p, double c) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0,1)");
  if (!(p > 0.0 && p < 2.0 / 3.0)) throw ConfigError("p must lie in (0, 2/3)");
  if (!(c >= 1.0 && c <= kFullAnalysisConstant)) throw ConfigError("analysis constant must lie in [1, 9984]");
}

// b = ln(1664 e ln(208/tau) / ((e-1) tau beta))
double budget_log_term(double tau, double beta) {
  return std::log(1664.0 * kE * std::log(208.0 / tau) / ((kE - 1.0) * tau * beta));
}

double round_beta(double beta, unsigned t) { return (kE - 1.0) * beta / kE * std::exp(-static_cast<double>(t)); }

// ln(1664 ln(208/tau) / (tau beta_t))
double round_log_term(double tau, double beta_t) { return std::log(1664.0 * std::log(208.0 / tau) / (tau * beta_t)); }

}  // namespace

void TOConfig::validate() const {
  check_common(tau, beta, p, analysis_constant);
  if (n == 0) throw ConfigError("initial round size n must be >= 1");
}

double TOSchedule::m_real() const { return std::exp(log_m); }

TOSchedule to_schedule_unchecked(const TOConfig& config, unsigned t) {
  config.validate();
  TOSchedule s;
  s.t = t;
  const double n_real = std::ceil(static_cast<double>(config.n) * std::exp(static_cast<double>(t)));
  if (!(n_real < 9.2e18)) throw ConfigError("round size N_" + std::to_string(t) + " overflows 64 bits");
  s.n_t = t == 0 ? config.n : static_cast<std::uint64_t>(n_real);
  s.beta_t = round_beta(config.beta, t);
  const double nt = static_cast<double>(s.n_t);
  const double c = config.analysis_constant;
  const double tau4 = std::pow(config.tau, 4.0);
  s.budget_real = tau4 * std::pow(nt, 2.0 - 2.0 * config.p) / (8.0 * c * c * round_log_term(config.tau, s.beta_t));
  s.log_m = std::log(s.beta_t / 4.0) + 2.0 * std::pow(nt, config.p);
  s.budget = s.budget_real >= 1.0 ? static_cast<std::uint64_t>(std::min(std::floor(s.budget_real), 9.2e18)) : 0;
  if (s.log_m >= std::log(static_cast<double>(kUnboundedCap))) {
    s.cap = kUnboundedCap;
  } else if (s.log_m >= 0.0) {
    s.cap = static_cast<std::uint64_t>(std::floor(std::exp(s.log_m)));
  }
  s.feasible = s.budget >= 1 && std::log(s.budget_real) <= s.log_m;
  return s;
}

TOSchedule to_schedule(const TOConfig& config, unsigned t) {
  auto s = to_schedule_unchecked(config, t);
  if (s.budget < 1) {
    throw ConfigError("round " + std::to_string(t) + ": overfitting budget B_t = " + std::to_string(s.budget_real) +
                      " < 1 (N_t = " + std::to_string(s.n_t) + ")");
  }
  if (std::log(s.budget_real) > s.log_m) {
    throw ConfigError("round " + std::to_string(t) + ": B_t exceeds the query allotment M_t");
  }
  return s;
}

nlohmann::json to_json(const TOSchedule& s, const TOConfig& config) {
  const double m = s.m_real();
  return {
      {"t", s.t},
      {"N_t", s.n_t},
      {"beta_t", s.beta_t},
      {"B_t", s.budget_real},
      {"M_t", std::isfinite(m) ? nlohmann::json(m) : nlohmann::json(nullptr)},
      {"log_M_t", s.log_m},
      {"feasible", s.feasible},
      {"mode", config.mode()},
  };
}

BudgetReport to_budget_check(double tau, double beta, double p, double analysis_constant) {
  check_common(tau, beta, p, analysis_constant);
  BudgetReport r;
  r.tau = tau;
  r.beta = beta;
  r.p = p;
  r.analysis_constant = analysis_constant;
  const double c = analysis_constant;
  const double scale = (c / kFullAnalysisConstant) * (c / kFullAnalysisConstant);
  const double tau2 = tau * tau;
  const double tau4 = tau2 * tau2;
  r.data_bound =
      scale * 21632.0 * std::log(6656.0 * kE * kE * std::log(208.0 / tau) / ((kE - 1.0) * tau * beta)) / tau2;
  const double b = budget_log_term(tau, beta);
  r.budget_bound =
      std::pow(8.0 * c * c * b / tau4 + 4.0 * c * c / ((1.0 - p) * tau4), 1.0 / (2.0 - 2.0 * p));
  r.ratio_bound = std::pow((3.0 - 2.0 * p) / (2.0 * p), (3.0 - 2.0 * p) / p);
  r.required = r.data_bound;
  r.binding = 1;
  r.binding_name = "data";
  if (r.budget_bound > r.required) {
    r.required = r.budget_bound;
    r.binding = 2;
    r.binding_name = "budget";
  }
  if (r.ratio_bound > r.required) {
    r.required = r.ratio_bound;
    r.binding = 3;
    r.binding_name = "ratio";
  }
  return r;
}

nlohmann::json to_json(const BudgetReport& r) {
  return {
      {"tau", r.tau},
      {"beta", r.beta},
      {"p", r.p},
      {"analysis_constant", r.analysis_constant},
      {"bound_1", r.data_bound},
      {"bound_2", r.budget_bound},
      {"bound_3", r.ratio_bound},
      {"required_n", r.required},
      {"binding_bound", r.binding},
      {"binding_name", r.binding_name},
  };
}

double min_round_size_for_unit_budget(double tau, double beta, double p, unsigned t, double analysis_constant) {
  check_common(tau, beta, p, analysis_constant);
  const double c = analysis_constant;
  const double need = 8.0 * c * c * round_log_term(tau, round_beta(beta, t)) / std::pow(tau, 4.0);
  return std::pow(need, 1.0 / (2.0 - 2.0 * p));
}

LemmaReport verify_appendix_d_lemmas(double tau, double beta, double p, double n, unsigned t_max) {
  check_common(tau, beta, p, kFullAnalysisConstant);
  if (!(n >= 1.0) || !std::isfinite(n)) throw ConfigError("lemma check: n must be >= 1");
  LemmaReport r;
  r.tau = tau;
  r.beta = beta;
  r.p = p;
  r.n = n;
  r.t_max = t_max;
  r.min_margin_d5 = std::numeric_limits<double>::infinity();
  r.min_margin_d6 = std::numeric_limits<double>::infinity();

  auto record = [&](LemmaCheckRow row, double scale) {
    row.margin = row.rhs - row.lhs;
    row.ok = row.margin >= -1e-9 * std::max(1.0, scale);
    if (!row.ok) ++r.violations;
    auto& slot = row.lemma == "D5" ? r.min_margin_d5 : r.min_margin_d6;
    slot = std::min(slot, row.margin);
    r.rows.push_back(std::move(row));
  };

  // Supremum bound, compared in log space:
  //   -t + ce ln(a (t + b)) <= ce (ln a + ln(b + ce))
  const double c = kFullAnalysisConstant;
  const double a = 8.0 * c * c / std::pow(tau, 4.0);
  const double b = budget_log_term(tau, beta);
  const double ce = 1.0 / (2.0 - 2.0 * p);
  const double log_rhs5 = ce * (std::log(a) + std::log(b + ce));
  auto log_lhs5 = [&](double t) { return -t + ce * std::log(a * (t + b)); };
  for (unsigned t = 0; t <= t_max; ++t) {
    record({"D5", "grid", static_cast<double>(t), log_lhs5(t), log_rhs5}, std::abs(log_rhs5));
  }
  if (ce - b > 0.0) record({"D5", "critical", ce - b, log_lhs5(ce - b), log_rhs5}, std::abs(log_rhs5));

  // Infimum bound on f(t) = 2 n^p e^(pt) - (3-2p) t - (2-2p) ln n.
  const double ln_n = std::log(n);
  const double first = ln_n - (3.0 - 2.0 * p) / p * std::log((3.0 - 2.0 * p) / (2.0 * kE * p));
  const double second = 2.0 * std::pow(n, p) - (2.0 - 2.0 * p) * ln_n;
  const double floor6 = std::min(first, second);
  r.d6_minimizer = first <= second ? "first" : "second";
  auto f = [&](double t) { return 2.0 * std::pow(n, p) * std::exp(p * t) - (3.0 - 2.0 * p) * t - (2.0 - 2.0 * p) * ln_n; };
  for (unsigned t = 0; t <= t_max; ++t) {
    record({"D6", "grid", static_cast<double>(t), floor6, f(t)}, std::abs(floor6));
  }
  // f'(t) = 0 at e^(pt) = (3-2p) / (2p n^p)
  const double t_star = std::log((3.0 - 2.0 * p) / (2.0 * p * std::pow(n, p))) / p;
  if (t_star > 0.0) record({"D6", "critical", t_star, floor6, f(t_star)}, std::abs(floor6));
  // Past the threshold n >= ((3-2p)/(2p))^(1/p) the first term is the smaller.
  const double threshold = std::pow((3.0 - 2.0 * p) / (2.0 * p), 1.0 / p);
  if (n >= threshold) record({"D6", "branch", 0.0, first, second}, std::abs(second));
  return r;
}

nlohmann::json to_json(const LemmaReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"lemma", row.lemma},
                    {"check", row.check},
                    {"t", row.t},
                    {"lhs", row.lhs},
                    {"rhs", row.rhs},
                    {"margin", row.margin},
                    {"ok", row.ok}});
  }
  return {
      {"tau", r.tau},
      {"beta", r.beta},
      {"p", r.p},
      {"n", r.n},
      {"t_max", r.t_max},
      {"violations", r.violations},
      {"min_margin_d5", r.min_margin_d5},
      {"min_margin_d6", r.min_margin_d6},
      {"d6_minimizer", r.d6_minimizer},
      {"rows", rows},
  };
}

EverlastingTO::EverlastingTO(TOConfig config, std::shared_ptr<const Distribution> dist, Rng& rng)
    : config_(config), dist_(std::move(dist)) {
  config_.validate();
  if (!dist_) throw ConfigError("mechanism needs a distribution");
  const auto bounds = to_budget_check(config_.tau, config_.beta, config_.p, config_.analysis_constant);
  const double n = static_cast<double>(config_.n);
  if (n < bounds.required) {
    throw ConfigError("initial round size n = " + std::to_string(config_.n) + " is below bound " +
                      std::to_string(bounds.binding) + " (" + bounds.binding_name + ") = " +
                      std::to_string(bounds.required) + " for " + config_.mode() + " mode");
  }
  ledger_.seed(2.0 * n);
  start_round(0, rng);
}

void EverlastingTO::start_round(unsigned t, Rng& rng) {
  schedule_ = to_schedule(config_, t);
  const auto next = to_schedule_unchecked(config_, t + 1);
  next_size_ = next.n_t;
  if (schedule_.n_t > kMaxDatasetSize) {
    throw ConfigError("round size N_" + std::to_string(t) + " = " + std::to_string(schedule_.n_t) +
                      " is too large to simulate");
  }
  const double cost = 2.0 * static_cast<double>(next_size_);
  top_price_ = cost / static_cast<double>(schedule_.budget);
  // Beyond the saturated count the round never ends by allotment; price at the real M_t.
  bottom_price_ = schedule_.cap == kUnboundedCap ? cost * std::exp(-schedule_.log_m)
                                                 : cost / static_cast<double>(schedule_.cap);
  round_revenue_.reset(0.0);

  ledger_.purchase(t, 2 * schedule_.n_t);
  auto s = sample_dataset(*dist_, schedule_.n_t, rng);
  auto tt = sample_dataset(*dist_, schedule_.n_t, rng);
  const double log_m = schedule_.cap == kUnboundedCap ? schedule_.log_m : std::log(static_cast<double>(schedule_.cap));
  round_ = std::make_unique<Thresholdout>(
      to_config_log(config_.tau, schedule_.beta_t, log_m, schedule_.budget), std::move(s), std::move(tt), rng);
}

bool EverlastingTO::round_exhausted() const { return round_->halted() || round_->answered() >= schedule_.cap; }

ToSubmission EverlastingTO::submit(const Query& q, Rng& rng) {
  ToSubmission out;
  if (round_exhausted()) {
    if (round_revenue_.value() + tolerance::kLedgerAbs < 2.0 * static_cast<double>(next_size_)) ++shortfalls_;
    start_round(schedule_.t + 1, rng);
    out.round_advanced = true;
  }
  const auto a = round_->answer(q, rng);
  out.answer = a.answer;
  out.above = a.above;
  out.mean_s = a.mean_s;
  out.mean_t = a.mean_t;
  out.round = schedule_.t;
  out.price = a.above ? top_price_ : bottom_price_;
  ledger_.collect(out.price);
  round_revenue_.add(out.price);
  return out;
}

}  // namespace everlast
