#include <gtest/gtest.h>

#include "everlast/errors.hpp"
#include "everlast/everlasting_validation.hpp"
#include "everlast/summation.hpp"
#include "oracle.hpp"

using namespace everlast;
using everlast::testing::oracle;

namespace {

const nlohmann::json& ev_oracle() { return oracle()["ev_0.4_0.1"]; }

std::shared_ptr<const Distribution> uniform64() {
  return std::make_shared<const Distribution>(Distribution::uniform(Domain::integers(64)));
}

std::vector<Query> random_queries(const DomainPtr& d, std::size_t count, std::uint64_t seed) {
  Rng rng{seed};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Query> qs;
  for (std::size_t j = 0; j < count; ++j) {
    std::vector<double> v(d->size());
    for (auto& x : v) x = u(rng);
    qs.emplace_back("q" + std::to_string(j), d, std::move(v));
  }
  return qs;
}

}  // namespace

TEST(EvParams, FrozenRoundZero) {
  EXPECT_NEAR(initial_budget(0.4, 0.1), ev_oracle()["Gamma"].get<double>(), 1e-12);
  EXPECT_EQ(initial_round_size(0.4, 0.1), ev_oracle()["N_0"].get<std::uint64_t>());
  for (const auto& r : ev_oracle()["rounds"]) {
    const unsigned t = r["t"].get<unsigned>();
    EXPECT_EQ(static_cast<std::uint64_t>(ev_round_size(493, t)), r["N_t"].get<std::uint64_t>());
    EXPECT_DOUBLE_EQ(ev_round_beta(0.1, t), r["beta_t"].get<double>());
    const auto n = r["N_t"].get<std::uint64_t>();
    EXPECT_EQ(round_cap(0.4, r["beta_t"].get<double>(), n), r["I_t"].get<std::uint64_t>());
    EXPECT_NEAR(vr_sigma2(0.4, r["beta_t"].get<double>(), n), r["sigma2_t"].get<double>(), 1e-18);
  }
}

TEST(EvParams, LowPrice) {
  EXPECT_DOUBLE_EQ(low_price(0.4, 1), 600.0);
  EXPECT_DOUBLE_EQ(low_price(0.4, 500), 1.2);
  EXPECT_THROW(low_price(0.4, 0), ConfigError);
  EXPECT_NEAR(low_price_total_bound(0.4, 500), oracle()["low_price_bound_0.4_500"].get<double>(), 1e-9);
}

TEST(EvParams, RoundSizeOverflowDetected) {
  EXPECT_NO_THROW(ev_round_size(493, 40));
  EXPECT_THROW(ev_round_size(493, 200), ConfigError);
}

TEST(Ev, SubsidyIsGammaAndGrantCoversRounding) {
  Rng rng{1};
  EverlastingValidation ev({0.4, 0.1}, uniform64(), rng);
  EXPECT_NEAR(ev.ledger().external_subsidy(), ev_oracle()["Gamma"].get<double>(), 1e-9);
  EXPECT_NEAR(ev.ledger().rounding_grant(), ev_oracle()["rounding_grant"].get<double>(), 1e-9);
  EXPECT_NEAR(ev.ledger().capital(), 0.0, 1e-9);
  EXPECT_EQ(ev.ledger().samples_bought(), 986u);
}

// Frozen: 500 non-adaptive queries cost sum_{i<=500} 96 / (0.16 i).
TEST(Ev, NonAdaptiveCostFrozen) {
  const auto dist = uniform64();
  const auto qs = random_queries(dist->domain(), 500, 7);
  Rng rng{2};
  EverlastingValidation ev({0.4, 0.1}, dist, rng);
  CompensatedSum cost;
  for (const auto& q : qs) cost.add(ev.submit(q, rng).price);
  ASSERT_EQ(ev.premature_halts(), 0u);
  EXPECT_NEAR(cost.value(), oracle()["low_price_sum_0.4_500"].get<double>(), 1e-6);
  EXPECT_LE(cost.value(), low_price_total_bound(0.4, 500));
  EXPECT_EQ(ev.revenue_lemma_failures(), 0u);
}

// Property: the non-adaptive cost does not depend on the data or noise draws.
TEST(Ev, CostIndependentOfSeed) {
  const auto dist = uniform64();
  const auto qs = random_queries(dist->domain(), 300, 8);
  std::optional<double> first;
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    Rng rng{seed};
    EverlastingValidation ev({0.4, 0.1}, dist, rng);
    CompensatedSum cost;
    for (const auto& q : qs) cost.add(ev.submit(q, rng).price);
    ASSERT_EQ(ev.premature_halts(), 0u);
    if (!first) first = cost.value();
    EXPECT_EQ(cost.value(), *first);
  }
}

TEST(Ev, NaturalEndSatisfiesRevenueLemma) {
  const auto dist = uniform64();
  Query flat("flat", dist->domain(), std::vector<double>(64, 0.5));
  Rng rng{3};
  EverlastingValidation ev({0.4, 0.1}, dist, rng);
  const auto cap0 = ev.current_round().config().cap;
  for (std::uint64_t i = 0; i < cap0; ++i) ASSERT_EQ(ev.submit(flat, rng).halts, 0u);
  const auto s = ev.submit(flat, rng);
  EXPECT_EQ(s.halts, 1u);
  EXPECT_EQ(s.premature_halts, 0u);
  EXPECT_EQ(s.high_charge, 0.0);
  EXPECT_EQ(s.round, 1u);
  EXPECT_EQ(s.index, cap0 + 1);
  EXPECT_DOUBLE_EQ(s.low_charge, low_price(0.4, cap0 + 1));
  EXPECT_EQ(ev.natural_ends(), 1u);
  EXPECT_EQ(ev.revenue_lemma_failures(), 0u);
  EXPECT_GE(ev.ledger().min_capital_after_purchase(), 0.0);
  EXPECT_EQ(ev.released_data().size(), 2u);

  const auto events = ev.take_events();
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.front().kind, EvEventKind::kPurchased);
  EXPECT_TRUE(ev.take_events().empty());
}

TEST(Ev, ResubmitFlagWaivesLowPrice) {
  const auto dist = uniform64();
  Query flat("flat", dist->domain(), std::vector<double>(64, 0.5));
  MechanismConfig c{0.4, 0.1};
  c.charge_low_price_on_resubmit = false;
  Rng rng{3};
  EverlastingValidation ev(c, dist, rng);
  const auto cap0 = ev.current_round().config().cap;
  for (std::uint64_t i = 0; i < cap0; ++i) (void)ev.submit(flat, rng);
  const auto s = ev.submit(flat, rng);
  EXPECT_EQ(s.halts, 1u);
  EXPECT_EQ(s.price, 0.0);
}

// Property: every answer obeys the sandwich and the ledger conserves value.
TEST(Ev, SandwichAndConservationProperty) {
  const auto dist = uniform64();
  const auto qs = random_queries(dist->domain(), 800, 9);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng{seed};
    EverlastingValidation ev({0.4, 0.1}, dist, rng);
    CompensatedSum revenue;
    for (const auto& q : qs) {
      const auto s = ev.submit(q, rng);
      revenue.add(s.price);
      ASSERT_LE(std::abs(s.answer - s.mean_t), 0.3);
      ASSERT_LE(std::abs(s.answer - s.mean_s), 0.1);
    }
    EXPECT_GE(ev.round_index(), 1u);
    EXPECT_NEAR(ev.ledger().conservation_residual(revenue.value()), 0.0, 1e-9);
    EXPECT_EQ(ev.ledger().negative_capital_events(), 0u);
    EXPECT_EQ(ev.cap_overruns(), 0u);
  }
}

TEST(Ev, ConfigValidation) {
  Rng rng{1};
  EXPECT_THROW(EverlastingValidation({1.2, 0.1}, uniform64(), rng), ConfigError);
  EXPECT_THROW(EverlastingValidation({0.4, 0.0}, uniform64(), rng), ConfigError);
  EXPECT_THROW(EverlastingValidation({0.4, 0.1}, nullptr, rng), ConfigError);
  MechanismConfig c{0.4, 0.1};
  c.sample_unit_cost = 0.0;
  EXPECT_THROW(EverlastingValidation(c, uniform64(), rng), ConfigError);
}
