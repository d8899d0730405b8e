#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "everlast/errors.hpp"
#include "everlast/thresholdout.hpp"
#include "oracle.hpp"

using namespace everlast;
using everlast::testing::oracle;

namespace {

void expect_feasibility(const ThresholdoutConfig& c, const nlohmann::json& o) {
  EXPECT_DOUBLE_EQ(c.zeta, o["zeta"].get<double>());
  EXPECT_NEAR(c.sigma, o["sigma"].get<double>(), 1e-18);
  EXPECT_NEAR(c.feasibility.pure_dp_min_n, o["pure_dp_min_n"].get<double>(), 1e-6);
  EXPECT_NEAR(c.feasibility.approx_dp_term_sqrt, o["approx_dp_term_sqrt"].get<double>(), 1e-5);
  EXPECT_NEAR(c.feasibility.approx_dp_term_log, o["approx_dp_term_log"].get<double>(), 1e-6);
  EXPECT_NEAR(c.feasibility.approx_dp_min_n, o["approx_dp_min_n"].get<double>(), 1e-5);
  EXPECT_NEAR(c.feasibility.nonadaptive_min_n, o["nonadaptive_min_n"].get<double>(), 1e-9);
}

}  // namespace

TEST(ThresholdoutConfig, Frozen) {
  expect_feasibility(to_config(0.2, 0.05, 1000, 4), oracle()["thresholdout_0.2_0.05_1000_4"]);
  expect_feasibility(to_config(0.4, 0.1, 200, 10), oracle()["thresholdout_0.4_0.1_200_10"]);
}

TEST(ThresholdoutConfig, Feasibility) {
  const auto c = to_config(0.4, 0.1, 200, 10);
  EXPECT_TRUE(c.feasibility.meets_nonadaptive(500));
  EXPECT_FALSE(c.feasibility.meets_either(500));
  EXPECT_TRUE(c.feasibility.meets_pure(5e5));
  EXPECT_NEAR(c.m(), 200.0, 1e-9);
}

TEST(ThresholdoutConfig, Rejects) {
  EXPECT_THROW(to_config(0.4, 0.1, 200, 0), ConfigError);
  EXPECT_THROW(to_config(0.4, 0.1, 5, 10), ConfigError);
  EXPECT_THROW(to_config(0.4, 0.1, 0.5, 1), ConfigError);
  EXPECT_THROW(to_config(0.0, 0.1, 200, 10), ConfigError);
}

TEST(Thresholdout, BudgetExhaustionHalts) {
  auto d = Domain::integers(2);
  // S all 0, T all 1: every indicator query crosses the threshold.
  Rng rng{1};
  Thresholdout to(to_config(0.4, 0.1, 200, 3), Dataset(d, std::vector<std::uint32_t>(100, 0)),
                  Dataset(d, std::vector<std::uint32_t>(100, 1)), rng);
  Query q("ind0", d, {1.0, 0.0});
  for (int i = 0; i < 3; ++i) {
    const auto a = to.answer(q, rng);
    EXPECT_TRUE(a.above);
    EXPECT_DOUBLE_EQ(a.answer, a.mean_t + a.xi);
  }
  EXPECT_TRUE(to.halted());
  EXPECT_EQ(to.above_count(), 3u);
  EXPECT_THROW(to.answer(q, rng), UsageError);
}

TEST(Thresholdout, AgreeingDataAnswersFromS) {
  auto d = Domain::integers(2);
  std::vector<std::uint32_t> same{0, 1, 0, 1, 1, 0};
  Rng rng{2};
  Thresholdout to(to_config(0.4, 0.1, 200, 3), Dataset(d, same), Dataset(d, same), rng);
  Query q("q", d, {0.25, 0.75});
  for (int i = 0; i < 100; ++i) {
    const auto a = to.answer(q, rng);
    ASSERT_FALSE(a.above);
    ASSERT_DOUBLE_EQ(a.answer, 0.5);
  }
  EXPECT_EQ(to.remaining_budget(), 3u);
  EXPECT_EQ(to.answered(), 100u);
}

TEST(Thresholdout, JsonKeys) {
  const auto j = to_json(to_config(0.4, 0.1, 200, 10));
  for (const char* k : {"tau", "beta", "log_m", "B", "zeta", "sigma", "pure_dp_min_n", "approx_dp_min_n"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
}
