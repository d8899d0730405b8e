#include "everlast_cli/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "everlast/errors.hpp"
#include "everlast/everlasting_to.hpp"
#include "everlast/everlasting_validation.hpp"
#include "everlast/harness.hpp"
#include "everlast/serialization.hpp"
#include "everlast/thresholdout.hpp"
#include "everlast/tolerances.hpp"
#include "everlast/validation_round.hpp"
#include "everlast_cli/noise_stats.hpp"

namespace everlast::cli {

namespace {

using io::format_double;
using nlohmann::json;

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

int report_checks(const std::vector<Check>& checks, std::ostream& out) {
  bool all = true;
  for (const auto& c : checks) {
    out << (c.ok ? "ok   " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << "\n";
    all = all && c.ok;
  }
  return all ? kExitOk : kExitAssertion;
}

void emit_json(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << j.dump(2) << "\n";
}

// ---- run ----------------------------------------------------------------

struct RunOptions {
  std::string config;
  std::string output_dir;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

std::vector<Check> campaign_checks(const RunConfig& config, const CampaignResult& res) {
  const auto& a = res.aggregate;
  std::vector<Check> checks;
  checks.push_back({"ledger conservation", a.max_abs_conservation_residual <= tolerance::kLedgerAbs,
                    "max |residual| = " + format_double(a.max_abs_conservation_residual)});
  checks.push_back({"capital >= 0 after every purchase", a.negative_capital_events == 0,
                    std::to_string(a.negative_capital_events) + " negative events"});
  if (config.mechanism == MechanismKind::kEV) {
    checks.push_back({"answer sandwich |a-E_T| <= 3tau/4, |a-E_S| <= tau/4", a.sandwich_violations == 0,
                      std::to_string(a.sandwich_violations) + " violations"});
    checks.push_back({"revenue lemma at natural round ends", a.revenue_lemma_failures == 0,
                      std::to_string(a.revenue_lemma_failures) + " failures"});
    const double gamma = initial_budget(config.params.tau, config.params.beta) * config.params.sample_unit_cost;
    bool subsidy_ok = true;
    for (const auto& r : res.records) {
      subsidy_ok = subsidy_ok && std::abs(r.external_subsidy - gamma) <= tolerance::kLedgerAbs;
    }
    checks.push_back({"external subsidy = Gamma", subsidy_ok, "Gamma = " + format_double(gamma)});
  }
  if (config.mechanism == MechanismKind::kTO) {
    checks.push_back({"round revenue covers 2 N_{t+1}", a.revenue_shortfalls == 0,
                      std::to_string(a.revenue_shortfalls) + " shortfalls"});
  }
  return checks;
}

int cmd_run(const RunOptions& o, std::ostream& out) {
  auto config = load_run_config(o.config);
  if (!o.output_dir.empty()) config.output.dir = o.output_dir;
  if (o.trials) config.trials = *o.trials;
  if (o.seed) config.seed = *o.seed;
  if (o.threads) config.threads = *o.threads;
  config.validate();
  const auto res = run_campaign(config);
  const auto& a = res.aggregate;
  out << "mechanism " << a.mechanism << ", " << a.trials << " trials, seed " << a.seed << "\n";
  out << "violation trials " << a.violation_trials << " (" << format_double(a.violation_fraction) << ")\n";
  out << "premature-halt trials " << a.premature_halt_trials << "\n";
  for (const auto& u : a.users) {
    out << "user " << u.tag << ": cost median " << format_double(u.cost.median) << ", max "
        << format_double(u.cost.max) << ", high-charge trials " << u.high_charge_trials << "\n";
  }
  for (const auto& p : res.written) out << "wrote " << p.string() << "\n";
  return report_checks(campaign_checks(config, res), out);
}

// ---- attack-demo --------------------------------------------------------

struct AttackOptions {
  std::uint64_t trials = 100;
  std::uint64_t seed = 20261019;
  std::uint64_t probes = kCalibratedProbes;
  unsigned threads = 1;
  std::string json_out;
};

int cmd_attack_demo(const AttackOptions& o, std::ostream& out) {
  auto naive_cfg = attack_demo_config(MechanismKind::kNaiveBaseline, o.trials, o.seed, o.probes);
  auto ev_cfg = attack_demo_config(MechanismKind::kEV, o.trials, o.seed, o.probes);
  naive_cfg.threads = ev_cfg.threads = o.threads;
  const auto naive = run_campaign(naive_cfg);
  const auto ev = run_campaign(ev_cfg);

  std::uint64_t caught = 0;
  for (const auto& r : ev.records) {
    const auto& u = r.users.front();
    if (u.premature_halts > 0 && u.high_charges > 0) ++caught;
  }
  const double floor = tolerance::binomial_lower(o.trials, 0.9);
  const auto trials = static_cast<double>(o.trials);
  out << "attacker: k = " << o.probes << " probes on a uniform domain of " << kAttackDomainSize << " elements\n";
  out << "NaiveBaseline (n = " << kNaiveSampleSize << "): violation trials " << naive.aggregate.violation_trials << "/"
      << o.trials << "\n";
  out << "EverlastingValidation: trials with a premature halt and a high charge " << caught << "/" << o.trials
      << ", violation trials " << ev.aggregate.violation_trials << "\n";

  if (!o.json_out.empty()) {
    emit_json({{"probes", o.probes},
               {"domain_size", kAttackDomainSize},
               {"naive", report_json(naive.aggregate, naive.records)},
               {"ev", report_json(ev.aggregate, ev.records)},
               {"ev_caught_trials", caught}},
              o.json_out, out);
  }
  return report_checks(
      {{"baseline overfits", static_cast<double>(naive.aggregate.violation_trials) >= floor,
        "need >= " + format_double(floor / trials * 100.0) + "% of trials"},
       {"EV halts the attack and charges it", static_cast<double>(caught) >= floor,
        "need >= " + format_double(floor / trials * 100.0) + "% of trials"},
       {"EV answer sandwich", ev.aggregate.sandwich_violations == 0,
        std::to_string(ev.aggregate.sandwich_violations) + " violations"}},
      out);
}

// ---- params -------------------------------------------------------------

struct ParamsOptions {
  std::string mech;
  double tau = 0.4;
  double beta = 0.1;
  double p = 0.5;
  double c = kFullAnalysisConstant;
  std::optional<std::uint64_t> n;
  double m = 200.0;
  std::uint64_t budget = 10;
  unsigned rounds = 4;
  bool json = false;
  std::string out;
};

json ev_params(const ParamsOptions& o, std::ostream& out) {
  const double gamma = initial_budget(o.tau, o.beta);
  const auto n0 = initial_round_size(o.tau, o.beta);
  json rounds = json::array();
  for (unsigned t = 0; t <= o.rounds; ++t) {
    const auto n = static_cast<std::uint64_t>(ev_round_size(n0, t));
    const double beta_t = ev_round_beta(o.beta, t);
    json r{{"t", t}, {"N_t", n}, {"beta_t", beta_t}, {"sigma2_t", vr_sigma2(o.tau, beta_t, n)},
           {"log_I_t", log_round_cap(o.tau, beta_t, n)}};
    try {
      r["I_t"] = round_cap(o.tau, beta_t, n);
    } catch (const ConfigError&) {
      r["I_t"] = 0;
    }
    rounds.push_back(r);
  }
  json j{{"mechanism", "EV"},
         {"tau", o.tau},
         {"beta", o.beta},
         {"Gamma", gamma},
         {"N_0", n0},
         {"I_0", rounds[0]["I_t"]},
         {"sigma2_0", rounds[0]["sigma2_t"]},
         {"low_price_numerator", 96.0 / (o.tau * o.tau)},
         {"rounds", rounds}};
  if (!o.json) {
    out << "Gamma = " << format_double(gamma) << "\n";
    out << "N_0 = " << n0 << "\n";
    out << "I_0 = " << rounds[0]["I_t"].get<std::uint64_t>() << "\n";
    out << "sigma2 = " << format_double(rounds[0]["sigma2_t"].get<double>()) << "\n";
    out << "low price = " << format_double(96.0 / (o.tau * o.tau)) << " / i\n";
    out << "t,N_t,beta_t,I_t,sigma2_t\n";
    for (const auto& r : rounds) {
      out << r["t"].get<unsigned>() << "," << r["N_t"].get<std::uint64_t>() << ","
          << format_double(r["beta_t"].get<double>()) << "," << r["I_t"].get<std::uint64_t>() << ","
          << format_double(r["sigma2_t"].get<double>()) << "\n";
    }
  }
  return j;
}

json to_params(const ParamsOptions& o, std::ostream& out) {
  const auto bounds = to_budget_check(o.tau, o.beta, o.p, o.c);
  const double min_n = min_round_size_for_unit_budget(o.tau, o.beta, o.p, 0, o.c);
  TOConfig cfg{o.tau, o.beta, o.p, o.n.value_or(static_cast<std::uint64_t>(std::ceil(bounds.required))), o.c};
  json schedule = json::array();
  for (unsigned t = 0; t <= o.rounds; ++t) {
    auto s = to_json(to_schedule_unchecked(cfg, t), cfg);
    s["binding_bound"] = bounds.binding;
    schedule.push_back(s);
  }
  json j{{"mechanism", "TO"},
         {"mode", cfg.mode()},
         {"n", cfg.n},
         {"bounds", to_json(bounds)},
         {"min_N0_for_unit_budget", min_n},
         {"n_meets_bounds", static_cast<double>(cfg.n) >= bounds.required},
         {"schedule", schedule}};
  if (!o.json) {
    out << "mode " << cfg.mode() << " (c = " << format_double(o.c) << ")\n";
    out << "bound 1 (data)   = " << format_double(bounds.data_bound) << "\n";
    out << "bound 2 (budget) = " << format_double(bounds.budget_bound) << "\n";
    out << "bound 3 (ratio)  = " << format_double(bounds.ratio_bound) << "\n";
    out << "required n >= " << format_double(bounds.required) << " (bound " << bounds.binding << " binds)\n";
    out << "N_0 for B_0 >= 1: " << format_double(min_n) << "\n";
    out << "n = " << cfg.n << (static_cast<double>(cfg.n) >= bounds.required ? " meets" : " misses")
        << " the bounds\n";
    out << "t,N_t,beta_t,B_t,log_M_t,feasible\n";
    for (const auto& s : schedule) {
      out << s["t"].get<unsigned>() << "," << s["N_t"].get<std::uint64_t>() << ","
          << format_double(s["beta_t"].get<double>()) << "," << format_double(s["B_t"].get<double>()) << ","
          << format_double(s["log_M_t"].get<double>()) << "," << (s["feasible"].get<bool>() ? "yes" : "no") << "\n";
    }
  }
  return j;
}

json thresholdout_params(const ParamsOptions& o, std::ostream& out) {
  const auto c = to_config(o.tau, o.beta, o.m, o.budget);
  json j = to_json(c);
  j["mechanism"] = "ThresholdoutOnly";
  if (o.n) {
    const double n = static_cast<double>(*o.n);
    j["n"] = *o.n;
    j["meets_pure"] = c.feasibility.meets_pure(n);
    j["meets_approx"] = c.feasibility.meets_approx(n);
    j["meets_nonadaptive"] = c.feasibility.meets_nonadaptive(n);
  }
  if (!o.json) {
    out << "zeta = " << format_double(c.zeta) << "\n";
    out << "sigma = " << format_double(c.sigma) << "\n";
    out << "pure-DP n >= " << format_double(c.feasibility.pure_dp_min_n) << "\n";
    out << "approx-DP n >= " << format_double(c.feasibility.approx_dp_min_n) << "\n";
    out << "non-adaptive n >= " << format_double(c.feasibility.nonadaptive_min_n) << "\n";
    if (o.n) {
      out << "n = " << *o.n << ": pure " << (j["meets_pure"].get<bool>() ? "yes" : "no") << ", approx "
          << (j["meets_approx"].get<bool>() ? "yes" : "no") << ", non-adaptive "
          << (j["meets_nonadaptive"].get<bool>() ? "yes" : "no") << "\n";
    }
  }
  return j;
}

int cmd_params(const ParamsOptions& o, std::ostream& out) {
  json j;
  if (o.mech == "ev") {
    j = ev_params(o, out);
  } else if (o.mech == "to") {
    j = to_params(o, out);
  } else {
    j = thresholdout_params(o, out);
  }
  if (o.json || !o.out.empty()) emit_json(j, o.out, out);
  return kExitOk;
}

// ---- lemma-check --------------------------------------------------------

struct LemmaOptions {
  double tau = 0.5;
  double beta = 0.2;
  double p = 0.5;
  std::optional<double> n;
  unsigned t_max = 60;
  bool json = false;
  std::string out;
};

int cmd_lemma_check(const LemmaOptions& o, std::ostream& out) {
  const double n = o.n.value_or(to_budget_check(o.tau, o.beta, o.p).required);
  const auto r = verify_appendix_d_lemmas(o.tau, o.beta, o.p, n, o.t_max);
  if (o.json || !o.out.empty()) emit_json(to_json(r), o.out, out);
  if (!o.json) {
    out << "tau=" << format_double(o.tau) << " beta=" << format_double(o.beta) << " p=" << format_double(o.p)
        << " n=" << format_double(n) << " t=0.." << o.t_max << "\n";
    out << "D5 min log-margin " << format_double(r.min_margin_d5) << "\n";
    out << "D6 min margin " << format_double(r.min_margin_d6) << " (smaller side: " << r.d6_minimizer << ")\n";
    out << "violations " << r.violations << "\n";
  }
  return r.violations == 0 ? kExitOk : kExitAssertion;
}

// ---- noise-test ---------------------------------------------------------

int cmd_noise_test(const NoiseTestOptions& o, bool as_json, std::ostream& out) {
  const auto r = run_noise_test(o);
  if (as_json) {
    out << to_json(r).dump(2) << "\n";
    return r.ok() ? kExitOk : kExitAssertion;
  }
  out << "truncated Gaussian: " << r.draws << " draws, sigma2 = " << format_double(o.sigma2)
      << ", gamma = " << format_double(o.gamma) << "\n";
  return report_checks(
      {{"no draw outside [-gamma, gamma]", r.outside == 0, std::to_string(r.outside) + " outside"},
       {"mean within 4 sigma / sqrt(draws)", std::abs(r.mean) <= r.mean_bound,
        format_double(r.mean) + " vs " + format_double(r.mean_bound)},
       {"KS vs inverse-CDF sample", r.ks < r.ks_critical,
        "D = " + format_double(r.ks) + ", critical " + format_double(r.ks_critical)},
       {"Laplace P(|X| > b ln 100) = 0.01 +- 0.003", r.laplace_ok(), format_double(r.tail)}},
      out);
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"everlast: everlasting-validity mechanism simulator"};
  app.require_subcommand(1);

  RunOptions run_o;
  auto* run_cmd = app.add_subcommand("run", "run a campaign from a JSON config file");
  run_cmd->add_option("--config", run_o.config, "run-config file")->required();
  run_cmd->add_option("--output-dir", run_o.output_dir, "output directory (EVERLAST_OUTPUT_DIR still wins)");
  run_cmd->add_option("--trials", run_o.trials, "override the trial count");
  run_cmd->add_option("--seed", run_o.seed, "override the master seed");
  run_cmd->add_option("--threads", run_o.threads, "trials run concurrently");

  AttackOptions attack_o;
  auto* attack_cmd = app.add_subcommand("attack-demo", "calibrated attacker against the baseline and EV");
  attack_cmd->add_option("--trials", attack_o.trials, "trials per mechanism")->check(CLI::PositiveNumber);
  attack_cmd->add_option("--seed", attack_o.seed, "master seed");
  attack_cmd->add_option("--probes", attack_o.probes, "probe count k")->check(CLI::PositiveNumber);
  attack_cmd->add_option("--threads", attack_o.threads, "trials run concurrently")->check(CLI::PositiveNumber);
  attack_cmd->add_option("--json", attack_o.json_out, "write both reports to this file");

  ParamsOptions params_o;
  auto* params_cmd = app.add_subcommand("params", "print derived parameters, schedules and feasibility");
  params_cmd->add_option("--mech", params_o.mech, "ev | to | thresholdout")
      ->required()
      ->check(CLI::IsMember({"ev", "to", "thresholdout"}));
  params_cmd->add_option("--tau", params_o.tau, "accuracy tau");
  params_cmd->add_option("--beta", params_o.beta, "failure probability beta");
  params_cmd->add_option("--p", params_o.p, "TO tradeoff exponent");
  params_cmd->add_option("--c", params_o.c, "TO analysis constant in [1, 9984]");
  params_cmd->add_option("--n", params_o.n, "TO initial round size / Thresholdout sample size");
  params_cmd->add_option("--m", params_o.m, "Thresholdout query allotment");
  params_cmd->add_option("--budget", params_o.budget, "Thresholdout overfitting budget B");
  params_cmd->add_option("--rounds", params_o.rounds, "last schedule round to print");
  params_cmd->add_flag("--json", params_o.json, "print JSON records only");
  params_cmd->add_option("--out", params_o.out, "write the JSON records to this file");

  LemmaOptions lemma_o;
  auto* lemma_cmd = app.add_subcommand("lemma-check", "numeric check of the round-schedule lemmas");
  lemma_cmd->add_option("--tau", lemma_o.tau, "accuracy tau");
  lemma_cmd->add_option("--beta", lemma_o.beta, "failure probability beta");
  lemma_cmd->add_option("--p", lemma_o.p, "tradeoff exponent");
  lemma_cmd->add_option("--n", lemma_o.n, "initial round size (default: the required bound)");
  lemma_cmd->add_option("--t-max", lemma_o.t_max, "last grid point");
  lemma_cmd->add_flag("--json", lemma_o.json, "print the JSON report only");
  lemma_cmd->add_option("--out", lemma_o.out, "write the JSON report to this file");

  NoiseTestOptions noise_o;
  bool noise_json = false;
  auto* noise_cmd = app.add_subcommand("noise-test", "sampler statistics");
  noise_cmd->add_option("--draws", noise_o.draws, "draws per sampler")->check(CLI::Range(std::uint64_t{1000}, std::uint64_t{100000000}));
  noise_cmd->add_option("--seed", noise_o.seed, "seed");
  noise_cmd->add_option("--sigma2", noise_o.sigma2, "Gaussian variance")->check(CLI::PositiveNumber);
  noise_cmd->add_option("--gamma", noise_o.gamma, "truncation radius")->check(CLI::PositiveNumber);
  noise_cmd->add_option("--laplace-scale", noise_o.laplace_scale, "Laplace scale b")->check(CLI::PositiveNumber);
  noise_cmd->add_flag("--json", noise_json, "print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_o, out);
    if (*attack_cmd) return cmd_attack_demo(attack_o, out);
    if (*params_cmd) return cmd_params(params_o, out);
    if (*lemma_cmd) return cmd_lemma_check(lemma_o, out);
    if (*noise_cmd) return cmd_noise_test(noise_o, noise_json, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "assertion failed: " << e.what() << "\n";
    return kExitAssertion;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
  return kExitUsage;
}

}  // namespace everlast::cli
