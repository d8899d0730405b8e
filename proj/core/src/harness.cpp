#include "everlast/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "everlast/errors.hpp"
#include "everlast/everlasting_to.hpp"
#include "everlast/everlasting_validation.hpp"
#include "everlast/serialization.hpp"
#include "everlast/summation.hpp"
#include "everlast/thresholdout.hpp"

namespace everlast {

namespace {

struct Step {
  std::optional<double> answer;
  double price = 0.0;
  double high = 0.0;
  std::uint64_t round = 0;
  unsigned premature = 0;
  unsigned natural = 0;
  bool above = false;
  bool sandwich = false;  // mean_s / mean_t are valid for the EV sandwich check
  double mean_s = 0.0;
  double mean_t = 0.0;
};

class Mechanism {
 public:
  virtual ~Mechanism() = default;
  virtual Step submit(const Query& q, Rng& rng) = 0;
  [[nodiscard]] virtual double capital() const = 0;
  /// Fills ledger and round fields of the record.
  virtual void finish(TrialRecord& r) const = 0;
  /// Event records since the last call.
  virtual std::vector<nlohmann::json> take_events() { return {}; }
};

void fill_ledger(const Ledger& l, TrialRecord& r) {
  r.samples_purchased = l.samples_bought();
  r.external_subsidy = l.external_subsidy();
  r.rounding_grant = l.rounding_grant();
  r.final_capital = l.capital();
  r.min_capital_after_purchase = l.min_capital_after_purchase();
  r.negative_capital_events = l.negative_capital_events();
  r.conservation_residual = l.conservation_residual(r.total_revenue);
}

class EvMechanism final : public Mechanism {
 public:
  EvMechanism(const MechanismParams& p, std::shared_ptr<const Distribution> dist, Rng& rng)
      : ev_(MechanismConfig{p.tau, p.beta, p.sample_unit_cost, p.charge_low_price_on_resubmit}, std::move(dist), rng) {}

  Step submit(const Query& q, Rng& rng) override {
    const auto s = ev_.submit(q, rng);
    Step out;
    out.answer = s.answer;
    out.price = s.price;
    out.high = s.high_charge;
    out.round = s.round;
    out.premature = s.premature_halts;
    out.natural = s.halts - s.premature_halts;
    out.sandwich = true;
    out.mean_s = s.mean_s;
    out.mean_t = s.mean_t;
    return out;
  }

  [[nodiscard]] double capital() const override { return ev_.ledger().capital(); }

  void finish(TrialRecord& r) const override {
    r.rounds = ev_.round_index() + 1;
    r.premature_halts = ev_.premature_halts();
    r.natural_ends = ev_.natural_ends();
    r.revenue_lemma_failures = ev_.revenue_lemma_failures();
    r.natural_end_high_cost = natural_high_.value();
    fill_ledger(ev_.ledger(), r);
  }

  std::vector<nlohmann::json> take_events() override {
    std::vector<nlohmann::json> out;
    for (const auto& e : ev_.take_events()) {
      if (e.kind == EvEventKind::kHalted && !e.premature) natural_high_.add(e.p);
      out.push_back(to_json(e));
    }
    return out;
  }

 private:
  EverlastingValidation ev_;
  CompensatedSum natural_high_;
};

class ToMechanism final : public Mechanism {
 public:
  ToMechanism(const MechanismParams& p, std::shared_ptr<const Distribution> dist, Rng& rng)
      : to_(TOConfig{p.tau, p.beta, p.p, p.n, p.analysis_constant}, std::move(dist), rng) {
    push_purchase();
  }

  Step submit(const Query& q, Rng& rng) override {
    const auto s = to_.submit(q, rng);
    if (s.round_advanced) {
      ++natural_;
      push_purchase();
    }
    Step out;
    out.answer = s.answer;
    out.price = s.price;
    out.round = s.round;
    out.above = s.above;
    out.natural = s.round_advanced ? 1 : 0;
    out.mean_s = s.mean_s;
    out.mean_t = s.mean_t;
    events_.push_back({{"event", "answered"},
                       {"i", ++i_},
                       {"t", s.round},
                       {"a", s.answer},
                       {"p", s.price},
                       {"N_t", to_.schedule().n_t},
                       {"capital", to_.ledger().capital()},
                       {"above", s.above}});
    return out;
  }

  [[nodiscard]] double capital() const override { return to_.ledger().capital(); }

  void finish(TrialRecord& r) const override {
    r.rounds = to_.round_index() + 1;
    r.natural_ends = natural_;
    r.revenue_shortfalls = to_.revenue_shortfalls();
    fill_ledger(to_.ledger(), r);
  }

  std::vector<nlohmann::json> take_events() override {
    std::vector<nlohmann::json> out;
    out.swap(events_);
    return out;
  }

 private:
  void push_purchase() {
    events_.push_back({{"event", "purchased"},
                       {"i", i_ + 1},
                       {"t", to_.round_index()},
                       {"a", nullptr},
                       {"p", 0.0},
                       {"N_t", to_.schedule().n_t},
                       {"capital", to_.ledger().capital()}});
  }

  EverlastingTO to_;
  std::uint64_t i_ = 0;
  std::uint64_t natural_ = 0;
  std::vector<nlohmann::json> events_;
};

class ThresholdoutOnlyMechanism final : public Mechanism {
 public:
  ThresholdoutOnlyMechanism(const MechanismParams& p, const Distribution& dist, Rng& rng)
      : allotment_(p.m), n_(p.n) {
    if (p.n < 1 || p.n > kMaxDatasetSize) throw ConfigError("thresholdout: n out of range");
    auto cfg = to_config(p.tau, p.beta, p.m, p.budget);
    auto s = sample_dataset(dist, p.n, rng);
    auto t = sample_dataset(dist, p.n, rng);
    to_ = std::make_unique<Thresholdout>(cfg, std::move(s), std::move(t), rng);
  }

  Step submit(const Query& q, Rng& rng) override {
    Step out;
    // Past the allotment or the budget the mechanism answers nothing.
    if (to_->halted() || static_cast<double>(to_->answered()) >= allotment_) return out;
    const auto a = to_->answer(q, rng);
    out.answer = a.answer;
    out.above = a.above;
    out.mean_s = a.mean_s;
    out.mean_t = a.mean_t;
    return out;
  }

  [[nodiscard]] double capital() const override { return 0.0; }

  void finish(TrialRecord& r) const override {
    r.rounds = 1;
    r.samples_purchased = 2 * n_;
  }

 private:
  double allotment_;
  std::uint64_t n_;
  std::unique_ptr<Thresholdout> to_;
};

class NaiveMechanism final : public Mechanism {
 public:
  NaiveMechanism(const MechanismParams& p, const Distribution& dist, Rng& rng)
      : s_(sample_dataset(dist, p.n, rng)) {}

  Step submit(const Query& q, Rng&) override {
    Step out;
    out.answer = empirical_mean(q, s_);
    out.mean_s = *out.answer;
    return out;
  }

  [[nodiscard]] double capital() const override { return 0.0; }

  void finish(TrialRecord& r) const override {
    r.rounds = 1;
    r.samples_purchased = s_.size();
  }

 private:
  Dataset s_;
};

std::unique_ptr<Mechanism> make_mechanism(const RunConfig& c, const CampaignContext& ctx, Rng& rng) {
  switch (c.mechanism) {
    case MechanismKind::kEV: return std::make_unique<EvMechanism>(c.params, ctx.distribution, rng);
    case MechanismKind::kTO: return std::make_unique<ToMechanism>(c.params, ctx.distribution, rng);
    case MechanismKind::kThresholdoutOnly:
      return std::make_unique<ThresholdoutOnlyMechanism>(c.params, *ctx.distribution, rng);
    case MechanismKind::kNaiveBaseline:
      if (c.params.n < 1 || c.params.n > kMaxDatasetSize) throw ConfigError("naive baseline: n out of range");
      return std::make_unique<NaiveMechanism>(c.params, *ctx.distribution, rng);
  }
  throw ConfigError("unknown mechanism");
}

std::vector<StrategyPtr> make_strategies(const RunConfig& c, const CampaignContext& ctx, std::uint64_t trial) {
  std::vector<StrategyPtr> out;
  const auto& domain = ctx.distribution->domain();
  for (std::size_t j = 0; j < c.strategies.size(); ++j) {
    const auto& s = c.strategies[j];
    switch (s.type) {
      case StrategyType::kPreregistered:
        if (!ctx.fixed_queries[j].empty()) {
          out.push_back(std::make_unique<PreregisteredUser>(s.tag, ctx.fixed_queries[j]));
        } else {
          // Tables come from a stream of their own so they do not depend on
          // how the strategy stream is used later.
          auto rng = make_stream(c.seed, trial, static_cast<std::uint64_t>(StreamTag::kTableBase) + j);
          out.push_back(PreregisteredUser::random(s.tag, domain, s.queries, s.law, rng));
        }
        break;
      case StrategyType::kSignAggregation:
        out.push_back(std::make_unique<SignAggregationAttacker>(s.tag, domain, s.probes));
        break;
      case StrategyType::kCollusion:
        out.push_back(std::make_unique<CollusionAttacker>(s.tag, domain, s.probes));
        break;
    }
  }
  return out;
}

std::uint64_t fnv1a(const Query& q) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= b[k];
      h *= 1099511628211ull;
    }
  };
  mix(q.id().data(), q.id().size());
  for (double v : q.values()) mix(&v, sizeof v);
  return h;
}

class Scheduler {
 public:
  Scheduler(ScheduleKind kind, std::vector<std::uint64_t> remaining, Rng rng)
      : kind_(kind), remaining_(std::move(remaining)), rng_(rng) {}

  /// Next strategy index, or nullopt when all are done.
  std::optional<std::size_t> next() {
    std::vector<std::size_t> open;
    for (std::size_t j = 0; j < remaining_.size(); ++j) {
      if (remaining_[j] > 0) open.push_back(j);
    }
    if (open.empty()) return std::nullopt;
    std::size_t pick = open.front();
    switch (kind_) {
      case ScheduleKind::kSequential: break;
      case ScheduleKind::kRoundRobin: {
        auto it = std::lower_bound(open.begin(), open.end(), cursor_);
        pick = it == open.end() ? open.front() : *it;
        cursor_ = pick + 1;
        break;
      }
      case ScheduleKind::kRandom: {
        std::uniform_int_distribution<std::size_t> u(0, open.size() - 1);
        pick = open[u(rng_)];
        break;
      }
    }
    --remaining_[pick];
    return pick;
  }

 private:
  ScheduleKind kind_;
  std::vector<std::uint64_t> remaining_;
  Rng rng_;
  std::size_t cursor_ = 0;
};

void append_csv(std::string& out, std::uint64_t trial, std::uint64_t i, std::uint64_t t, const std::string& user,
                const std::string& query_id, const std::optional<double>& answer, double price, bool overfit,
                double capital) {
  out += std::to_string(trial);
  out += ',';
  out += std::to_string(i);
  out += ',';
  out += std::to_string(t);
  out += ',';
  out += user;
  out += ',';
  out += query_id;
  out += ',';
  if (answer) out += io::format_double(*answer);
  out += ',';
  out += io::format_double(price);
  out += ',';
  out += overfit ? '1' : '0';
  out += ',';
  out += io::format_double(capital);
  out += '\n';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

}  // namespace

CampaignContext prepare_campaign(const RunConfig& config) {
  config.validate();
  CampaignContext ctx;
  if (config.distribution.file) {
    std::ifstream in(*config.distribution.file);
    if (!in) throw ConfigError("cannot open distribution file '" + config.distribution.file->string() + "'");
    ctx.distribution = std::make_shared<const Distribution>(io::read_distribution(in));
  } else {
    ctx.distribution =
        std::make_shared<const Distribution>(Distribution::uniform(Domain::integers(config.distribution.domain_size)));
  }
  ctx.fixed_queries.resize(config.strategies.size());
  for (std::size_t j = 0; j < config.strategies.size(); ++j) {
    for (const auto& f : config.strategies[j].query_files) {
      std::ifstream in(f);
      if (!in) throw ConfigError("cannot open query file '" + f.string() + "'");
      ctx.fixed_queries[j].push_back(std::make_shared<const Query>(io::read_query(in, ctx.distribution->domain())));
    }
  }
  // Feasibility: build the mechanism once on a throwaway stream.
  Rng probe{0};
  (void)make_mechanism(config, ctx, probe);
  return ctx;
}

std::string csv_header() { return "trial,i,t,user_tag,query_id,answer,price,overfit_flag,capital\n"; }

TrialOutput run_trial(const RunConfig& config, const CampaignContext& ctx, std::uint64_t trial,
                      const TrialOptions& options) {
  TrialOutput out;
  auto& rec = out.record;
  rec.trial = trial;
  const double tau = config.params.tau;

  Rng mech_rng = make_stream(config.seed, trial, StreamTag::kMechanism);
  auto mech = make_mechanism(config, ctx, mech_rng);
  auto strategies = make_strategies(config, ctx, trial);
  const std::size_t users = strategies.size();
  std::vector<Rng> user_rngs;
  std::vector<std::uint64_t> planned;
  bool retain = false;
  rec.users.resize(users);
  for (std::size_t j = 0; j < users; ++j) {
    user_rngs.push_back(make_stream(config.seed, trial, static_cast<std::uint64_t>(StreamTag::kUserBase) + j));
    planned.push_back(strategies[j]->planned_queries());
    retain = retain || strategies[j]->kind() == StrategyKind::kArbitrary;
    rec.users[j].tag = strategies[j]->tag();
    rec.users[j].kind = to_string(strategies[j]->kind());
  }
  if (options.capture_queries) out.query_hashes.resize(users);
  Scheduler scheduler(config.schedule, planned, make_stream(config.seed, trial, StreamTag::kSchedule));

  std::vector<HistoryEntry> global;
  std::vector<std::vector<HistoryEntry>> own(users);
  std::vector<CompensatedSum> costs(users);
  std::vector<CompensatedSum> highs(users);
  std::vector<bool> started(users, false);
  std::vector<bool> foreign_turnover(users, false);
  CompensatedSum revenue;
  auto flush_events = [&] {
    if (!options.events) {
      (void)mech->take_events();
      return;
    }
    for (auto& e : mech->take_events()) {
      e["trial"] = trial;
      out.events += e.dump();
      out.events += '\n';
    }
  };
  flush_events();

  std::uint64_t seq = 0;
  while (const auto pick = scheduler.next()) {
    const std::size_t u = *pick;
    auto& stats = rec.users[u];
    std::span<const HistoryEntry> visible;
    switch (strategies[u]->kind()) {
      case StrategyKind::kNonAdaptive: break;
      case StrategyKind::kAutonomous: visible = own[u]; break;
      case StrategyKind::kArbitrary: visible = global; break;
    }
    QueryPtr q = strategies[u]->next_query(visible, user_rngs[u]);
    if (!q || !q->domain()->same_as(*ctx.distribution->domain())) {
      throw UsageError("strategy '" + stats.tag + "' produced a query over the wrong domain");
    }
    if (options.capture_queries) out.query_hashes[u].push_back(fnv1a(*q));

    if (started[u] && foreign_turnover[u]) stats.turnover_coupled = true;
    started[u] = true;
    foreign_turnover[u] = false;

    const Step step = mech->submit(*q, mech_rng);
    flush_events();

    ++rec.queries;
    ++stats.queries;
    costs[u].add(step.price);
    revenue.add(step.price);
    highs[u].add(step.high);
    if (step.high > 0.0) ++stats.high_charges;
    stats.premature_halts += step.premature;
    stats.natural_ends += step.natural;
    if (step.premature + step.natural > 0) {
      for (std::size_t v = 0; v < users; ++v) {
        if (v != u && started[v]) foreign_turnover[v] = true;
      }
    }
    if (step.above) ++stats.above;

    bool overfit = false;
    if (step.answer) {
      ++rec.answered;
      ++stats.answered;
      const double a = *step.answer;
      const double err = std::abs(a - true_mean(*q, *ctx.distribution));
      overfit = err > tau;
      rec.max_error = std::max(rec.max_error, err);
      stats.max_error = std::max(stats.max_error, err);
      if (overfit) {
        ++rec.violations;
        ++stats.violations;
      }
      if (step.sandwich) {
        const double gs = std::abs(a - step.mean_s);
        const double gt = std::abs(a - step.mean_t);
        rec.max_gap_s = std::max(rec.max_gap_s, gs);
        rec.max_gap_t = std::max(rec.max_gap_t, gt);
        if (gt > 0.75 * tau || gs > 0.25 * tau) ++rec.sandwich_violations;
      }
    }

    HistoryEntry h{seq, u, q->id(), retain ? q : nullptr, step.answer, step.price, step.round};
    if (retain) global.push_back(h);
    if (strategies[u]->kind() == StrategyKind::kAutonomous) own[u].push_back(std::move(h));
    ++seq;

    if (options.csv) {
      append_csv(out.csv, trial, seq, step.round, stats.tag, q->id(), step.answer, step.price, overfit,
                 mech->capital());
    }
  }
  rec.violation = rec.violations > 0;
  rec.total_revenue = revenue.value();
  for (std::size_t u = 0; u < users; ++u) {
    rec.users[u].cost = costs[u].value();
    rec.users[u].high_cost = highs[u].value();
  }
  mech->finish(rec);
  return out;
}

CampaignResult run_campaign(const RunConfig& config) {
  const auto ctx = prepare_campaign(config);
  const auto dir = resolve_output_dir(config.output);
  TrialOptions options;
  options.csv = config.output.csv.has_value();
  options.events = config.output.events.has_value();

  std::vector<TrialOutput> outputs(config.trials);
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(config.threads, config.trials));
  if (workers <= 1) {
    for (std::uint64_t k = 0; k < config.trials; ++k) outputs[k] = run_trial(config, ctx, k, options);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t k = next++; k < config.trials; k = next++) {
          try {
            outputs[k] = run_trial(config, ctx, k, options);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  CampaignResult result;
  result.records.reserve(outputs.size());
  for (auto& o : outputs) result.records.push_back(std::move(o.record));
  result.aggregate = fold(result.records, to_string(config.mechanism), config.seed, config.params.tau,
                          config.params.beta);

  if (options.csv || options.events || config.output.report) std::filesystem::create_directories(dir);
  if (options.csv) {
    std::string csv = csv_header();
    for (const auto& o : outputs) csv += o.csv;
    write_file(dir / *config.output.csv, csv);
    result.written.push_back(dir / *config.output.csv);
  }
  if (options.events) {
    std::string events;
    for (const auto& o : outputs) events += o.events;
    write_file(dir / *config.output.events, events);
    result.written.push_back(dir / *config.output.events);
  }
  if (config.output.report) {
    auto j = report_json(result.aggregate, result.records);
    j["config"] = to_json(config);
    write_file(dir / *config.output.report, j.dump(2) + "\n");
    result.written.push_back(dir / *config.output.report);
  }
  return result;
}

RunConfig attack_demo_config(MechanismKind mechanism, std::uint64_t trials, std::uint64_t seed,
                             std::uint64_t probes) {
  RunConfig c;
  c.mechanism = mechanism;
  c.params.tau = 0.4;
  c.params.beta = 0.1;
  c.params.n = kNaiveSampleSize;
  c.distribution.domain_size = kAttackDomainSize;
  StrategySpec attacker;
  attacker.type = StrategyType::kSignAggregation;
  attacker.tag = "attacker";
  attacker.probes = probes;
  c.strategies.push_back(attacker);
  c.schedule = ScheduleKind::kSequential;
  c.trials = trials;
  c.seed = seed;
  c.output.csv.reset();
  c.output.report.reset();
  c.output.events.reset();
  return c;
}

}  // namespace everlast
