#include <gtest/gtest.h>

#include <cmath>

#include "everlast/errors.hpp"
#include "everlast/noise.hpp"
#include "oracle.hpp"

using namespace everlast;
using everlast::testing::oracle;

TEST(Noise, VrSigma2Frozen) {
  EXPECT_NEAR(vr_sigma2(0.4, 0.1, 500), oracle()["vr_sigma2_0.4_0.1_500"].get<double>(), 1e-18);
  EXPECT_THROW(vr_sigma2(0.0, 0.1, 500), ConfigError);
  EXPECT_THROW(vr_sigma2(0.4, 1.0, 500), ConfigError);
  EXPECT_THROW(vr_sigma2(0.4, 0.1, 1), ConfigError);
}

TEST(Noise, AcceptanceProbability) {
  const auto p = TruncGaussParams::make(vr_sigma2(0.4, 0.1, 500), 0.1);
  EXPECT_NEAR(trunc_gauss_acceptance(p), oracle()["trunc_gauss_acceptance_500"].get<double>(), 1e-15);
  EXPECT_NEAR(trunc_gauss_acceptance(TruncGaussParams::make(1.0, 1.0)), std::erf(1.0 / std::sqrt(2.0)), 1e-15);
}

TEST(Noise, ParamValidation) {
  EXPECT_THROW(TruncGaussParams::make(0.0, 0.1), ConfigError);
  EXPECT_THROW(TruncGaussParams::make(1.0, -1.0), ConfigError);
  EXPECT_THROW(LaplaceParams::make(0.0), ConfigError);
  EXPECT_THROW(LaplaceParams::make(std::nan("")), ConfigError);
}

TEST(Noise, TruncatedGaussianStaysInside) {
  // Acceptance here is only about 0.38; the support bound must still hold.
  const auto p = TruncGaussParams::make(1.0, 0.5);
  Rng rng{5};
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_trunc_gauss(p, rng);
    ASSERT_LE(std::abs(x), 0.5);
    sum += x;
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 * 0.5 / std::sqrt(n));
}

TEST(Noise, RejectionLimitRaises) {
  // gamma = 1e-9 sigma: acceptance ~ 8e-10, so 1000 attempts essentially never succeed.
  const auto p = TruncGaussParams::make(1.0, 1e-9);
  Rng rng{1};
  EXPECT_THROW(sample_trunc_gauss(p, rng), SamplingError);
}

TEST(Noise, LaplaceMomentsAndTail) {
  const auto p = LaplaceParams::make(2.0);
  Rng rng{77};
  const int n = 400000;
  double abs_sum = 0.0;
  int tail = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_laplace(p, rng);
    abs_sum += std::abs(x);
    if (std::abs(x) > 2.0 * std::log(100.0)) ++tail;
  }
  EXPECT_NEAR(abs_sum / n, 2.0, 0.02);  // E|X| = b
  EXPECT_NEAR(static_cast<double>(tail) / n, oracle()["laplace_tail_ln100"].get<double>(), 0.001);
}

TEST(Noise, Deterministic) {
  const auto p = TruncGaussParams::make(0.01, 0.1);
  Rng a{9}, b{9};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_trunc_gauss(p, a), sample_trunc_gauss(p, b));
}
