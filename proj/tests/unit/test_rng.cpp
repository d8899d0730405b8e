#include <gtest/gtest.h>

#include <set>

#include "everlast/rng.hpp"

using namespace everlast;

TEST(Rng, SplitmixReferenceValue) {
  // First output of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, StreamsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    for (std::uint64_t tag : {1ull, 2ull, 3ull, 1000ull, 1001ull, 2000ull}) {
      EXPECT_TRUE(seen.insert(derive_seed(42, trial, tag)).second);
    }
  }
  EXPECT_EQ(derive_seed(42, 7, StreamTag::kSchedule), derive_seed(42, 7, 3));
  auto a = make_stream(5, 1, StreamTag::kMechanism);
  auto b = make_stream(5, 1, StreamTag::kMechanism);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, OpenUnitIsStrictlyPositive) {
  Rng rng{1};
  for (int i = 0; i < 100000; ++i) {
    const double u = open_unit(rng);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
