#include <gtest/gtest.h>

#include <sstream>

#include "everlast/errors.hpp"
#include "everlast/serialization.hpp"

using namespace everlast;

TEST(FormatDouble, ShortestRoundTrip) {
  for (double x : {0.0, 1.0, 0.1, 1.0 / 3.0, 4075.694057994315, 2.861035146142707e-4, 1e300}) {
    EXPECT_EQ(std::stod(io::format_double(x)), x) << io::format_double(x);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(Serialization, DistributionRoundTrip) {
  auto d = Domain::labeled({"red", "green", "blue"});
  Distribution dist(d, {0.2, 0.3, 0.5});
  std::stringstream ss;
  io::write_distribution(ss, dist);
  const auto back = io::read_distribution(ss);
  ASSERT_EQ(back.domain()->size(), 3u);
  EXPECT_EQ(back.domain()->label(1), "green");
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back.probs()[i], dist.probs()[i]);
}

TEST(Serialization, QueryRoundTrip) {
  auto d = Domain::integers(4);
  Query q("my-query", d, {0.0, 1.0 / 3.0, 0.75, 1.0});
  std::stringstream ss;
  io::write_query(ss, q);
  const auto back = io::read_query(ss, d);
  EXPECT_EQ(back.id(), "my-query");
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(back(i), q(i));
}

TEST(Serialization, DatasetRoundTripPreservesCounts) {
  auto d = Domain::integers(5);
  Dataset ds(d, {4, 1, 1, 0, 4, 4});
  std::stringstream ss;
  io::write_dataset(ss, ds);
  const auto back = io::read_dataset(ss, d);
  ASSERT_EQ(back.size(), ds.size());
  std::vector<int> a(5), b(5);
  for (auto s : ds.samples()) ++a[s];
  for (auto s : back.samples()) ++b[s];
  EXPECT_EQ(a, b);
}

TEST(Serialization, RejectsMalformed) {
  auto d = Domain::integers(2);
  {
    std::stringstream ss("# everlast query v1 id=x\nelement,value\n0,0.5\n7,0.1\n");
    EXPECT_THROW(io::read_query(ss, d), ConfigError);
  }
  {
    std::stringstream ss("# everlast query v1 id=x\nelement,value\n0,0.5\n1,abc\n");
    EXPECT_THROW(io::read_query(ss, d), ConfigError);
  }
  {
    std::stringstream ss("not a header\n");
    EXPECT_THROW(io::read_distribution(ss), ConfigError);
  }
}
