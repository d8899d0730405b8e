#include "everlast/report.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "everlast/summation.hpp"

namespace everlast {

Quantiles quantiles(std::vector<double> xs) {
  Quantiles q;
  if (xs.empty()) return q;
  std::sort(xs.begin(), xs.end());
  auto at = [&](double p) {
    const double h = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
  };
  q.min = xs.front();
  q.p25 = at(0.25);
  q.median = at(0.5);
  q.p75 = at(0.75);
  q.max = xs.back();
  q.mean = compensated_sum(xs) / static_cast<double>(xs.size());
  return q;
}

AggregateReport fold(std::span<const TrialRecord> records, const std::string& mechanism, std::uint64_t seed,
                     double tau, double beta) {
  AggregateReport a;
  a.mechanism = mechanism;
  a.seed = seed;
  a.trials = records.size();
  a.tau = tau;
  a.beta = beta;
  CompensatedSum natural_high;
  std::vector<double> samples;
  std::vector<double> rounds;
  std::vector<std::vector<double>> costs;
  for (const auto& r : records) {
    a.violation_trials += r.violation ? 1 : 0;
    a.premature_halt_trials += r.premature_halts > 0 ? 1 : 0;
    a.sandwich_violations += r.sandwich_violations;
    a.revenue_lemma_failures += r.revenue_lemma_failures;
    a.revenue_shortfalls += r.revenue_shortfalls;
    a.negative_capital_events += r.negative_capital_events;
    natural_high.add(r.natural_end_high_cost);
    a.max_abs_conservation_residual = std::max(a.max_abs_conservation_residual, std::abs(r.conservation_residual));
    a.min_capital_after_purchase = &r == records.data() ? r.min_capital_after_purchase
                                                        : std::min(a.min_capital_after_purchase, r.min_capital_after_purchase);
    samples.push_back(static_cast<double>(r.samples_purchased));
    rounds.push_back(static_cast<double>(r.rounds));
    if (a.users.size() < r.users.size()) {
      a.users.resize(r.users.size());
      costs.resize(r.users.size());
    }
    for (std::size_t u = 0; u < r.users.size(); ++u) {
      const auto& s = r.users[u];
      auto& ua = a.users[u];
      ua.tag = s.tag;
      ua.premature_halt_trials += s.premature_halts > 0 ? 1 : 0;
      ua.high_charge_trials += s.high_charges > 0 ? 1 : 0;
      ua.violation_trials += s.violations > 0 ? 1 : 0;
      ua.above_trials += s.above > 0 ? 1 : 0;
      ua.turnover_coupled_trials += s.turnover_coupled ? 1 : 0;
      costs[u].push_back(s.cost);
    }
  }
  a.natural_end_high_cost = natural_high.value();
  a.violation_fraction = a.trials ? static_cast<double>(a.violation_trials) / static_cast<double>(a.trials) : 0.0;
  a.samples_purchased = quantiles(std::move(samples));
  a.rounds = quantiles(std::move(rounds));
  for (std::size_t u = 0; u < a.users.size(); ++u) a.users[u].cost = quantiles(std::move(costs[u]));
  return a;
}

nlohmann::json to_json(const Quantiles& q) {
  return {{"min", q.min}, {"p25", q.p25}, {"median", q.median}, {"p75", q.p75}, {"max", q.max}, {"mean", q.mean}};
}

nlohmann::json to_json(const UserTrialStats& u) {
  return {
      {"tag", u.tag},
      {"kind", u.kind},
      {"queries", u.queries},
      {"answered", u.answered},
      {"cost", u.cost},
      {"high_cost", u.high_cost},
      {"high_charges", u.high_charges},
      {"premature_halts", u.premature_halts},
      {"natural_ends", u.natural_ends},
      {"above", u.above},
      {"violations", u.violations},
      {"max_error", u.max_error},
      {"turnover_coupled", u.turnover_coupled},
  };
}

nlohmann::json to_json(const TrialRecord& r) {
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : r.users) users.push_back(to_json(u));
  return {
      {"trial", r.trial},
      {"queries", r.queries},
      {"answered", r.answered},
      {"max_error", r.max_error},
      {"violation", r.violation},
      {"violations", r.violations},
      {"sandwich_violations", r.sandwich_violations},
      {"max_gap_s", r.max_gap_s},
      {"max_gap_t", r.max_gap_t},
      {"rounds", r.rounds},
      {"premature_halts", r.premature_halts},
      {"natural_ends", r.natural_ends},
      {"natural_end_high_cost", r.natural_end_high_cost},
      {"revenue_lemma_failures", r.revenue_lemma_failures},
      {"revenue_shortfalls", r.revenue_shortfalls},
      {"ledger",
       {{"samples_purchased", r.samples_purchased},
        {"external_subsidy", r.external_subsidy},
        {"rounding_grant", r.rounding_grant},
        {"total_revenue", r.total_revenue},
        {"final_capital", r.final_capital},
        {"min_capital_after_purchase", r.min_capital_after_purchase},
        {"negative_capital_events", r.negative_capital_events},
        {"conservation_residual", r.conservation_residual}}},
      {"users", users},
  };
}

nlohmann::json report_json(const AggregateReport& a, std::span<const TrialRecord> records) {
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : a.users) {
    users.push_back({{"tag", u.tag},
                     {"cost", to_json(u.cost)},
                     {"premature_halt_trials", u.premature_halt_trials},
                     {"high_charge_trials", u.high_charge_trials},
                     {"violation_trials", u.violation_trials},
                     {"above_trials", u.above_trials},
                     {"turnover_coupled_trials", u.turnover_coupled_trials}});
  }
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& r : records) trials.push_back(to_json(r));
  return {
      {"schema", kReportSchema},
      {"mechanism", a.mechanism},
      {"seed", a.seed},
      {"trials", a.trials},
      {"tau", a.tau},
      {"beta", a.beta},
      {"aggregate",
       {{"violation_trials", a.violation_trials},
        {"violation_fraction", a.violation_fraction},
        {"premature_halt_trials", a.premature_halt_trials},
        {"sandwich_violations", a.sandwich_violations},
        {"revenue_lemma_failures", a.revenue_lemma_failures},
        {"revenue_shortfalls", a.revenue_shortfalls},
        {"negative_capital_events", a.negative_capital_events},
        {"natural_end_high_cost", a.natural_end_high_cost},
        {"max_abs_conservation_residual", a.max_abs_conservation_residual},
        {"min_capital_after_purchase", a.min_capital_after_purchase},
        {"samples_purchased", to_json(a.samples_purchased)},
        {"rounds", to_json(a.rounds)},
        {"users", users}}},
      {"per_trial", trials},
  };
}

}  // namespace everlast
