#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace everlast {

inline constexpr const char* kReportSchema = "everlast.report/1";

struct UserTrialStats {
  std::string tag;
  std::string kind;
  std::uint64_t queries = 0;
  std::uint64_t answered = 0;
  double cost = 0.0;
  double high_cost = 0.0;          // sum of high charges
  std::uint64_t high_charges = 0;  // positive high charges
  std::uint64_t premature_halts = 0;
  std::uint64_t natural_ends = 0;  // rounds this user's query ended by cap
  std::uint64_t above = 0;         // Thresholdout top answers
  std::uint64_t violations = 0;    // answers with |a - E[q]| > tau
  double max_error = 0.0;          // max |a - E[q]|
  bool turnover_coupled = false;   // another user's query turned a round over between two of ours
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t queries = 0;
  std::uint64_t answered = 0;
  double max_error = 0.0;
  bool violation = false;          // any |a - E[q]| > tau
  std::uint64_t violations = 0;
  std::uint64_t sandwich_violations = 0;  // EV: |a - E_T| > 3 tau/4 or |a - E_S| > tau/4
  double max_gap_s = 0.0;          // EV: max |a - E_S|
  double max_gap_t = 0.0;          // EV: max |a - E_T|
  std::uint64_t rounds = 0;        // rounds consumed (started)
  std::uint64_t premature_halts = 0;
  std::uint64_t natural_ends = 0;
  double natural_end_high_cost = 0.0;
  std::uint64_t revenue_lemma_failures = 0;
  std::uint64_t revenue_shortfalls = 0;  // TO: rounds whose revenue missed 2 N_{t+1}
  std::uint64_t samples_purchased = 0;
  double external_subsidy = 0.0;
  double rounding_grant = 0.0;
  double total_revenue = 0.0;      // sum of transcript prices
  double final_capital = 0.0;
  double min_capital_after_purchase = 0.0;
  std::uint64_t negative_capital_events = 0;
  double conservation_residual = 0.0;
  std::vector<UserTrialStats> users;
};

struct Quantiles {
  double min = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Type-7 quantiles (linear interpolation) of `xs`.
Quantiles quantiles(std::vector<double> xs);

struct UserAggregate {
  std::string tag;
  Quantiles cost;
  std::uint64_t premature_halt_trials = 0;
  std::uint64_t high_charge_trials = 0;
  std::uint64_t violation_trials = 0;
  std::uint64_t above_trials = 0;
  std::uint64_t turnover_coupled_trials = 0;
};

struct AggregateReport {
  std::string mechanism;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  double tau = 0.0;
  double beta = 0.0;
  std::uint64_t violation_trials = 0;
  double violation_fraction = 0.0;
  std::uint64_t premature_halt_trials = 0;
  std::uint64_t sandwich_violations = 0;
  std::uint64_t revenue_lemma_failures = 0;
  std::uint64_t revenue_shortfalls = 0;
  std::uint64_t negative_capital_events = 0;
  double natural_end_high_cost = 0.0;
  double max_abs_conservation_residual = 0.0;
  double min_capital_after_purchase = 0.0;
  Quantiles samples_purchased;
  Quantiles rounds;
  std::vector<UserAggregate> users;  // in strategy order
};

/// Aggregates per-trial records. A pure function of `records` in order.
AggregateReport fold(std::span<const TrialRecord> records, const std::string& mechanism, std::uint64_t seed,
                     double tau, double beta);

nlohmann::json to_json(const UserTrialStats& u);
nlohmann::json to_json(const TrialRecord& r);
nlohmann::json to_json(const Quantiles& q);
/// {"schema": "everlast.report/1", ..., "aggregate": {...}, "trials": [...]}
nlohmann::json report_json(const AggregateReport& agg, std::span<const TrialRecord> records);

}  // namespace everlast
