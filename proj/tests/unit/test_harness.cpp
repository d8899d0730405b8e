#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "everlast/errors.hpp"
#include "everlast/everlasting_validation.hpp"
#include "everlast/harness.hpp"
#include "everlast/serialization.hpp"

using namespace everlast;

namespace {

RunConfig small_ev(std::uint64_t trials) {
  RunConfig c;
  c.mechanism = MechanismKind::kEV;
  StrategySpec a;
  a.tag = "analyst";
  a.queries = 300;
  c.strategies.push_back(a);
  c.trials = trials;
  c.seed = 31;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST(Harness, CsvShape) {
  auto c = small_ev(1);
  const auto ctx = prepare_campaign(c);
  TrialOptions o;
  o.csv = true;
  o.events = true;
  const auto out = run_trial(c, ctx, 0, o);
  EXPECT_EQ(csv_header(), "trial,i,t,user_tag,query_id,answer,price,overfit_flag,capital\n");
  std::istringstream rows(out.csv);
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line.rfind("0,1,0,analyst,analyst/q0,", 0), 0u) << line;
  std::size_t n = 1;
  while (std::getline(rows, line)) ++n;
  EXPECT_EQ(n, 300u);
  EXPECT_EQ(out.record.queries, 300u);

  std::istringstream ev(out.events);
  std::getline(ev, line);
  const auto first = nlohmann::json::parse(line);
  EXPECT_EQ(first["event"], "purchased");
  EXPECT_EQ(first["trial"], 0);
}

TEST(Harness, EvTrialRecord) {
  auto c = small_ev(1);
  const auto ctx = prepare_campaign(c);
  const auto r = run_trial(c, ctx, 0).record;
  EXPECT_EQ(r.sandwich_violations, 0u);
  EXPECT_NEAR(r.external_subsidy, initial_budget(0.4, 0.1), 1e-9);
  EXPECT_NEAR(r.conservation_residual, 0.0, 1e-9);
  EXPECT_EQ(r.negative_capital_events, 0u);
  EXPECT_GE(r.rounds, 2u);  // 300 > I_0 = 239
  ASSERT_EQ(r.users.size(), 1u);
  EXPECT_EQ(r.users[0].kind, "non_adaptive");
}

TEST(Harness, CampaignWritesFilesAndIsReproducible) {
  TempDir dir("everlast_harness_campaign");
  auto c = small_ev(3);
  c.output.dir = dir.path;
  unsetenv("EVERLAST_OUTPUT_DIR");
  const auto r1 = run_campaign(c);
  ASSERT_EQ(r1.written.size(), 3u);
  const auto csv1 = slurp(dir.path / "transcript.csv");
  const auto report = nlohmann::json::parse(slurp(dir.path / "report.json"));
  EXPECT_EQ(report["schema"], kReportSchema);
  EXPECT_EQ(report["config"]["mechanism"], "EV");

  c.threads = 3;
  (void)run_campaign(c);
  EXPECT_EQ(slurp(dir.path / "transcript.csv"), csv1);
}

TEST(Harness, EveryMechanismRuns) {
  for (auto kind : {MechanismKind::kEV, MechanismKind::kThresholdoutOnly, MechanismKind::kNaiveBaseline}) {
    auto c = small_ev(2);
    c.mechanism = kind;
    c.output = {};
    c.output.csv.reset();
    c.output.report.reset();
    c.output.events.reset();
    const auto res = run_campaign(c);
    EXPECT_EQ(res.records.size(), 2u) << to_string(kind);
    EXPECT_TRUE(res.written.empty());
  }
  auto to = small_ev(1);
  to.mechanism = MechanismKind::kTO;
  to.params.analysis_constant = 1.0;
  to.params.n = 4353;
  to.output.csv.reset();
  to.output.report.reset();
  to.output.events.reset();
  const auto r = run_campaign(to).records.at(0);
  EXPECT_EQ(r.queries, 300u);
  EXPECT_NEAR(r.conservation_residual, 0.0, 1e-9);
}

TEST(Harness, ThresholdoutOnlyStopsAtAllotment) {
  auto c = small_ev(1);
  c.mechanism = MechanismKind::kThresholdoutOnly;
  c.params.m = 100;
  const auto ctx = prepare_campaign(c);
  const auto r = run_trial(c, ctx, 0).record;
  EXPECT_EQ(r.queries, 300u);
  EXPECT_EQ(r.answered, 100u);
}

TEST(Harness, InfeasibleConfigRejectedUpFront) {
  auto c = small_ev(1);
  c.mechanism = MechanismKind::kTO;  // full constant with n = 500
  EXPECT_THROW(prepare_campaign(c), ConfigError);
}

TEST(Harness, QueryFilesAndDistributionFile) {
  TempDir dir("everlast_harness_files");
  auto d = Domain::labeled({"x", "y", "z"});
  {
    std::ofstream f(dir.path / "dist.txt");
    io::write_distribution(f, Distribution(d, {0.5, 0.25, 0.25}));
    std::ofstream q(dir.path / "q.txt");
    io::write_query(q, Query("only", d, {1.0, 0.0, 0.5}));
  }
  RunConfig c;
  c.mechanism = MechanismKind::kNaiveBaseline;
  c.distribution.file = dir.path / "dist.txt";
  StrategySpec s;
  s.tag = "u";
  s.query_files = {dir.path / "q.txt"};
  c.strategies.push_back(s);
  const auto ctx = prepare_campaign(c);
  const auto r = run_trial(c, ctx, 0).record;
  EXPECT_EQ(r.queries, 1u);
  EXPECT_EQ(r.answered, 1u);
}

TEST(Harness, AttackDemoConfig) {
  const auto c = attack_demo_config(MechanismKind::kEV, 10, 5);
  EXPECT_EQ(c.distribution.domain_size, kAttackDomainSize);
  EXPECT_EQ(c.strategies.at(0).probes, kCalibratedProbes);
  EXPECT_EQ(c.schedule, ScheduleKind::kSequential);
  EXPECT_FALSE(c.output.csv.has_value());
}
