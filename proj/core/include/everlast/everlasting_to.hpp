#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "everlast/core.hpp"
#include "everlast/ledger.hpp"
#include "everlast/thresholdout.hpp"

namespace everlast {

/// Analysis constant in the round budget B_t and the initial-budget bounds.
inline constexpr double kFullAnalysisConstant = 9984.0;

struct TOConfig {
  double tau = 0.4;
  double beta = 0.1;
  double p = 0.5;            // tradeoff exponent, (0, 2/3)
  std::uint64_t n = 0;       // initial round size N_0
  double analysis_constant = kFullAnalysisConstant;  // c in [1, 9984]

  /// Range checks only (not the initial-budget bounds).
  void validate() const;
  /// c = 9984 gives the full analysis; anything smaller is simulation mode.
  [[nodiscard]] bool full_constant() const noexcept { return analysis_constant == kFullAnalysisConstant; }
  [[nodiscard]] std::string mode() const { return full_constant() ? "full-constant" : "simulation"; }
};

/// Round-t quantities of the chained Thresholdout mechanism.
struct TOSchedule {
  unsigned t = 0;
  std::uint64_t n_t = 0;     // ceil(n e^t)
  double beta_t = 0.0;       // ((e-1) beta / e) e^-t
  double budget_real = 0.0;  // B_t = tau^4 N_t^(2-2p) / (8 c^2 ln(1664 ln(208/tau) / (tau beta_t)))
  double log_m = 0.0;        // ln M_t = ln(beta_t / 4) + 2 N_t^p
  std::uint64_t budget = 0;  // floor(B_t), 0 if B_t < 1
  std::uint64_t cap = 0;     // floor(M_t), saturated at kUnboundedCap
  bool feasible = false;     // 1 <= floor(B_t) and B_t <= M_t

  /// M_t as a double (may be +inf).
  [[nodiscard]] double m_real() const;
};

/// Computes the round-t schedule without feasibility checks.
TOSchedule to_schedule_unchecked(const TOConfig& config, unsigned t);
/// Same, but throws ConfigError naming the violated bound when floor(B_t) < 1
/// or B_t > M_t.
TOSchedule to_schedule(const TOConfig& config, unsigned t);

/// {t, N_t, beta_t, B_t, M_t, log_M_t, feasible, mode}
nlohmann::json to_json(const TOSchedule& s, const TOConfig& config);

/// The three initial-budget lower bounds and which one binds.
struct BudgetReport {
  double tau = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double analysis_constant = kFullAnalysisConstant;
  /// 21632 ln(6656 e^2 ln(208/tau) / ((e-1) tau beta)) / tau^2, scaled by (c/9984)^2
  double data_bound = 0.0;
  /// (8 c^2 b / tau^4 + 4 c^2 / ((1-p) tau^4))^(1/(2-2p)), b = ln(1664 e ln(208/tau) / ((e-1) tau beta))
  double budget_bound = 0.0;
  /// ((3-2p)/(2p))^((3-2p)/p)
  double ratio_bound = 0.0;
  double required = 0.0;
  int binding = 0;  // 1, 2 or 3
  std::string binding_name;
};

BudgetReport to_budget_check(double tau, double beta, double p, double analysis_constant = kFullAnalysisConstant);
nlohmann::json to_json(const BudgetReport& r);

/// Smallest N_t for which B_t >= 1 in round t (closed form).
double min_round_size_for_unit_budget(double tau, double beta, double p, unsigned t = 0,
                                      double analysis_constant = kFullAnalysisConstant);

/// One numeric inequality evaluation.
struct LemmaCheckRow {
  std::string lemma;      // "D5" or "D6"
  std::string check;      // short label of what was compared
  double t = 0.0;         // grid point (or real critical point)
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;    // positive means the inequality holds
  bool ok = true;
};

struct LemmaReport {
  double tau = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double n = 0.0;
  unsigned t_max = 0;
  std::vector<LemmaCheckRow> rows;
  std::size_t violations = 0;
  double min_margin_d5 = 0.0;
  double min_margin_d6 = 0.0;
  /// Which side of the D6 minimum is smaller at this n ("first" = ln n - ... term).
  std::string d6_minimizer;
};

/// Evaluates both sides of the supremum bound on e^-t (a t + a b)^c and of the
/// infimum bound on 2 n^p e^(pt) - (3-2p) t - (2-2p) ln n over t = 0..t_max.
/// Any violation indicates a transcription error.
LemmaReport verify_appendix_d_lemmas(double tau, double beta, double p, double n, unsigned t_max = 60);
nlohmann::json to_json(const LemmaReport& r);

struct ToSubmission {
  double answer = 0.0;
  bool above = false;
  double price = 0.0;
  std::uint64_t round = 0;
  double mean_s = 0.0;
  double mean_t = 0.0;
  bool round_advanced = false;  // a new round started before this query
};

/// Chained Thresholdout rounds. Round t runs Thresholdout with budget
/// floor(B_t) and allotment floor(M_t) on N_t samples per half; bottom answers
/// cost 2 N_{t+1} / floor(M_t), top answers 2 N_{t+1} / floor(B_t). The round
/// ends when the budget is spent or floor(M_t) queries were answered, and
/// the mechanism then buys 2 N_{t+1} samples.
class EverlastingTO {
 public:
  /// Throws ConfigError if the config violates any initial-budget bound or if
  /// round 0 is infeasible.
  EverlastingTO(TOConfig config, std::shared_ptr<const Distribution> dist, Rng& rng);

  ToSubmission submit(const Query& q, Rng& rng);

  [[nodiscard]] const TOConfig& config() const noexcept { return config_; }
  [[nodiscard]] const Ledger& ledger() const noexcept { return ledger_; }
  [[nodiscard]] const TOSchedule& schedule() const noexcept { return schedule_; }
  [[nodiscard]] const Thresholdout& current() const noexcept { return *round_; }
  [[nodiscard]] std::uint64_t round_index() const noexcept { return schedule_.t; }
  [[nodiscard]] double bottom_price() const noexcept { return bottom_price_; }
  [[nodiscard]] double top_price() const noexcept { return top_price_; }
  /// Round ends where collected revenue fell short of 2 N_{t+1}.
  [[nodiscard]] std::uint64_t revenue_shortfalls() const noexcept { return shortfalls_; }

 private:
  void start_round(unsigned t, Rng& rng);
  [[nodiscard]] bool round_exhausted() const;

  TOConfig config_;
  std::shared_ptr<const Distribution> dist_;
  Ledger ledger_;
  TOSchedule schedule_;
  std::uint64_t next_size_ = 0;
  double bottom_price_ = 0.0;
  double top_price_ = 0.0;
  CompensatedSum round_revenue_;
  std::unique_ptr<Thresholdout> round_;
  std::uint64_t shortfalls_ = 0;
};

}  // namespace everlast
