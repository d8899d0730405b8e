// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "everlast/errors.hpp"
#include "everlast/everlasting_to.hpp"
#include "everlast/everlasting_validation.hpp"
#include "everlast/harness.hpp"
#include "everlast/serialization.hpp"
#include "everlast/summation.hpp"
#include "everlast/tolerances.hpp"
#include "everlast_cli/noise_stats.hpp"
#include "oracle.hpp"

using namespace everlast;
namespace fs = std::filesystem;
using everlast::io::format_double;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Every EV campaign run by the suite; criteria 1, 3 and 5 are checked over all of them.
std::vector<TrialRecord> g_ev_records;
std::uint64_t g_ev_answered = 0;

void remember_ev(const CampaignResult& r) {
  for (const auto& rec : r.records) {
    g_ev_records.push_back(rec);
    g_ev_answered += rec.answered;
  }
}

RunConfig load_config(const std::string& name, bool keep_csv = false) {
  auto c = load_run_config(fs::path(EVERLAST_CONFIG_DIR) / name);
  if (!keep_csv) c.output.csv.reset();
  c.output.report.reset();
  c.output.events.reset();
  return c;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("everlast_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string count_of(std::uint64_t k, std::uint64_t n) { return std::to_string(k) + "/" + std::to_string(n); }

const double kGamma = initial_budget(0.4, 0.1);

// ---- criterion 2 ------------------------------------------------------------

fs::path g_reference_csv;

Outcome validity() {
  auto c = load_config("reference_ev.json", true);
  c.output.dir = scratch("reference_a");
  const auto r = run_campaign(c);
  remember_ev(r);
  g_reference_csv = c.output.dir / *c.output.csv;
  const double limit = tolerance::binomial_upper(c.trials, c.params.beta / 2.0);
  const auto v = r.aggregate.violation_trials;
  return {static_cast<double>(v) <= limit, "violation trials " + count_of(v, c.trials) + ", limit " +
                                               format_double(std::floor(limit * 100) / 100)};
}

// ---- criterion 4 ------------------------------------------------------------

Outcome nonadaptive_cost() {
  const auto c = load_config("nonadaptive_ev.json");
  const auto r = run_campaign(c);
  remember_ev(r);
  const double frozen = everlast::testing::oracle()["low_price_sum_0.4_500"].get<double>();
  const double bound = low_price_total_bound(0.4, 500);
  std::uint64_t premature = 0;
  std::uint64_t exact = 0;
  double worst = 0.0;
  bool within_bound = true;
  for (const auto& rec : r.records) {
    const auto& u = rec.users.at(0);
    if (u.queries != 500) return {false, "user submitted " + std::to_string(u.queries) + " queries"};
    if (u.premature_halts > 0) {
      ++premature;
      continue;
    }
    worst = std::max(worst, std::abs(u.cost - frozen));
    if (std::abs(u.cost - frozen) <= tolerance::kCostAbs) ++exact;
    within_bound = within_bound && u.cost <= bound;
  }
  const double premature_limit = tolerance::binomial_upper(c.trials, c.params.beta);
  const bool ok = exact == c.trials - premature && within_bound && static_cast<double>(premature) <= premature_limit;
  return {ok, "cost " + format_double(frozen) + " in " + count_of(exact, c.trials - premature) +
                  " halt-free trials (max dev " + format_double(worst) + "), <= " + format_double(bound) +
                  "; premature-halt trials " + std::to_string(premature)};
}

// ---- criterion 6 ------------------------------------------------------------

Outcome attack_demo() {
  const std::uint64_t trials = 100;
  const std::uint64_t seed = 20261019;
  const auto naive = run_campaign(attack_demo_config(MechanismKind::kNaiveBaseline, trials, seed));
  const auto ev = run_campaign(attack_demo_config(MechanismKind::kEV, trials, seed));
  remember_ev(ev);
  std::uint64_t caught = 0;
  for (const auto& r : ev.records) {
    const auto& u = r.users.at(0);
    if (u.premature_halts > 0 && u.high_charges > 0) ++caught;
  }
  const double floor = tolerance::binomial_lower(trials, 0.9);
  const auto violations = naive.aggregate.violation_trials;
  const bool ok = static_cast<double>(violations) >= floor && static_cast<double>(caught) >= floor &&
                  ev.aggregate.sandwich_violations == 0;
  return {ok, "baseline violation trials " + count_of(violations, trials) + ", EV halt+charge trials " +
                  count_of(caught, trials) + ", need >= " + format_double(std::ceil(floor))};
}

// ---- criterion 7 ------------------------------------------------------------

Outcome thresholdout() {
  const auto c = load_config("thresholdout.json");
  const auto r = run_campaign(c);
  std::uint64_t above = 0;
  for (const auto& rec : r.records) {
    bool any = false;
    for (const auto& u : rec.users) any = any || (u.kind == "non_adaptive" && u.above > 0);
    above += any ? 1 : 0;
  }
  const double limit = tolerance::binomial_upper(c.trials, c.params.beta);
  return {static_cast<double>(above) <= limit,
          "trials with a top answer " + count_of(above, c.trials) + ", limit " + format_double(std::floor(limit))};
}

// ---- criterion 8 ------------------------------------------------------------

Outcome noise() {
  const auto r = cli::run_noise_test({});
  return {r.ok(), "outside " + std::to_string(r.outside) + ", |mean| " + format_double(std::abs(r.mean)) + " < " +
                      format_double(r.mean_bound) + ", KS " + format_double(r.ks) + " < " +
                      format_double(r.ks_critical) + ", Laplace tail " + format_double(r.tail)};
}

// ---- criterion 9 ------------------------------------------------------------

Outcome lemma_sweep() {
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::size_t schedule_failures = 0;
  std::size_t rounds_checked = 0;
  double worst_identity = 0.0;
  for (double tau : {0.2, 0.5}) {
    for (double beta : {0.05, 0.2}) {
      for (double p : {0.1, 0.3, 0.5}) {
        const double n = std::ceil(to_budget_check(tau, beta, p).required);
        const auto rep = verify_appendix_d_lemmas(tau, beta, p, n);
        checks += rep.rows.size();
        violations += rep.violations;

        // At n >= the bounds every round must be feasible: 1 <= floor(B_t) and B_t <= M_t.
        // Rounds whose N_t does not fit 64 bits contribute only their beta_t.
        const bool representable = n < 9.2e18;
        const TOConfig cfg{tau, beta, p, representable ? static_cast<std::uint64_t>(n) : 1};
        CompensatedSum sum;
        for (unsigned t = 0; t < 40; ++t) {
          const double closed = (std::exp(1.0) - 1.0) * beta / std::exp(1.0) * std::exp(-static_cast<double>(t));
          if (!representable) {
            sum.add(closed);
            continue;
          }
          try {
            const auto s = to_schedule_unchecked(cfg, t);
            sum.add(s.beta_t);
            ++rounds_checked;
            if (!s.feasible) ++schedule_failures;
          } catch (const ConfigError&) {
            sum.add(closed);
          }
        }
        worst_identity = std::max(worst_identity, std::abs(sum.value() - beta));
        if (std::abs(sum.value() - beta) > tolerance::kScheduleIdentity) ++schedule_failures;
      }
    }
  }
  const double frozen = everlast::testing::oracle()["to_min_n_unit_budget_0.5_0.2_0.5"].get<double>();
  const double min_n = min_round_size_for_unit_budget(0.5, 0.2, 0.5);
  const bool order_ok = std::abs(std::log10(min_n) - std::log10(frozen)) < 0.5 && min_n >= 1e11;
  const bool ok = violations == 0 && schedule_failures == 0 && order_ok;
  return {ok, std::to_string(checks) + " lemma checks, " + std::to_string(violations) + " violations; " +
                  std::to_string(rounds_checked) + " schedule rounds, " + std::to_string(schedule_failures) +
                  " failures (sum beta_t dev " + format_double(worst_identity) +
                  "); N_0 for B_0 >= 1 at c=9984 tau=0.5 p=0.5: " + format_double(min_n)};
}

// ---- criterion 10 -----------------------------------------------------------

Outcome reproducibility() {
  if (g_reference_csv.empty() || !fs::exists(g_reference_csv)) return {false, "reference transcript missing"};
  auto c = load_config("reference_ev.json", true);
  c.output.dir = scratch("reference_b");
  c.threads = 4;  // different scheduling of trials onto workers, same bytes
  remember_ev(run_campaign(c));
  const auto a = slurp(g_reference_csv);
  const auto b = slurp(c.output.dir / *c.output.csv);

  auto to = load_config("to_simulation.json", true);
  to.output.dir = scratch("to_a");
  (void)run_campaign(to);
  const auto ta = slurp(to.output.dir / *to.output.csv);
  to.output.dir = scratch("to_b");
  (void)run_campaign(to);
  const auto tb = slurp(to.output.dir / *to.output.csv);

  const bool ok = !a.empty() && a == b && !ta.empty() && ta == tb;
  for (const char* d : {"reference_a", "reference_b", "to_a", "to_b"}) {
    fs::remove_all(fs::temp_directory_path() / (std::string("everlast_acceptance_") + d));
  }
  return {ok, "reference transcript " + std::to_string(a.size()) + " bytes " + (a == b ? "identical" : "DIFFERS") +
                  ", TO transcript " + std::to_string(ta.size()) + " bytes " + (ta == tb ? "identical" : "DIFFERS")};
}

// ---- criteria over every EV campaign ---------------------------------------

Outcome sandwich() {
  std::uint64_t bad = 0;
  double gs = 0.0, gt = 0.0;
  for (const auto& r : g_ev_records) {
    bad += r.sandwich_violations;
    gs = std::max(gs, r.max_gap_s);
    gt = std::max(gt, r.max_gap_t);
  }
  return {bad == 0 && g_ev_answered > 0, std::to_string(g_ev_answered) + " EV answers in " +
                                             std::to_string(g_ev_records.size()) + " trials, " + std::to_string(bad) +
                                             " violations; max |a-E_S| " + format_double(gs) + ", max |a-E_T| " +
                                             format_double(gt)};
}

Outcome sustainability() {
  std::uint64_t negative = 0;
  double min_capital = 0.0;
  double worst_subsidy = 0.0;
  for (const auto& r : g_ev_records) {
    negative += r.negative_capital_events;
    min_capital = std::min(min_capital, r.min_capital_after_purchase);
    worst_subsidy = std::max(worst_subsidy, std::abs(r.external_subsidy - kGamma));
  }
  const double frozen = everlast::testing::oracle()["ev_0.4_0.1"]["Gamma"].get<double>();
  const bool ok = !g_ev_records.empty() && negative == 0 && worst_subsidy <= 1e-9 &&
                  std::abs(kGamma - frozen) <= 1e-9;
  return {ok, std::to_string(g_ev_records.size()) + " trials, negative-capital purchases " + std::to_string(negative) +
                  ", min capital " + format_double(min_capital) + ", subsidy " + format_double(kGamma) +
                  " (max dev " + format_double(worst_subsidy) + ")"};
}

Outcome revenue_lemma() {
  std::uint64_t natural = 0, failures = 0;
  double high = 0.0;
  for (const auto& r : g_ev_records) {
    natural += r.natural_ends;
    failures += r.revenue_lemma_failures;
    high += r.natural_end_high_cost;
  }
  return {failures == 0 && high == 0.0, std::to_string(natural) + " natural round ends, " + std::to_string(failures) +
                                            " with capital < 6 N_t, high charge " + format_double(high)};
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  // Outputs go where the suite puts them, whatever the caller's environment says.
  unsetenv("EVERLAST_OUTPUT_DIR");

  // Campaign criteria first; 1, 3 and 5 summarise every EV trial run before them.
  const std::vector<Criterion> criteria = {
      {2, "validity monte carlo", 60, validity},
      {4, "non-adaptive cost", 0, nonadaptive_cost},
      {6, "attack demonstration", 120, attack_demo},
      {7, "thresholdout behaviour", 30, thresholdout},
      {8, "noise samplers", 20, noise},
      {9, "lemma sweep and schedule", 10, lemma_sweep},
      {10, "reproducibility", 0, reproducibility},
      {1, "deterministic sandwich", 0, sandwich},
      {3, "sustainability", 0, sustainability},
      {5, "revenue lemma", 0, revenue_lemma},
  };

  std::vector<std::pair<int, std::string>> lines;
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(1);
    bool pass = o.pass;
    line << " (" << secs << " s";
    if (c.budget_s > 0) {
      line << " of " << c.budget_s << " s";
      if (secs > c.budget_s) pass = false;
    }
    line << ")";
    const std::string text = std::string(pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + " " +
                             c.name + ": " + o.detail + line.str();
    std::cerr << text << std::endl;  // progress while the suite runs
    lines.emplace_back(c.id, text);
    all = all && pass;
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& [id, text] : lines) std::cout << text << "\n";
  std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}
