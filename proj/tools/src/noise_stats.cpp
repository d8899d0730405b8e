#include "everlast_cli/noise_stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "everlast/noise.hpp"
#include "everlast/rng.hpp"
#include "everlast/summation.hpp"
#include "everlast/tolerances.hpp"

namespace everlast::cli {

std::vector<double> trunc_gauss_inverse_cdf(double sigma2, double gamma, std::uint64_t draws, std::uint64_t seed) {
  const double sigma = std::sqrt(sigma2);
  const boost::math::normal_distribution<double> unit;
  const double lo = boost::math::cdf(unit, -gamma / sigma);
  const double hi = boost::math::cdf(unit, gamma / sigma);
  Rng rng{derive_seed(seed, 0, 2)};
  std::vector<double> out(draws);
  for (auto& x : out) x = sigma * boost::math::quantile(unit, lo + open_unit(rng) * (hi - lo));
  return out;
}

double ks_two_sample(std::vector<double>& a, std::vector<double>& b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

NoiseTestResult run_noise_test(const NoiseTestOptions& o) {
  NoiseTestResult r;
  r.draws = o.draws;
  const auto params = TruncGaussParams::make(o.sigma2, o.gamma);
  Rng rng{derive_seed(o.seed, 0, 1)};
  std::vector<double> xs(o.draws);
  CompensatedSum sum;
  for (auto& x : xs) {
    x = sample_trunc_gauss(params, rng);
    if (std::abs(x) > o.gamma) ++r.outside;
    sum.add(x);
  }
  r.mean = sum.value() / static_cast<double>(o.draws);
  r.mean_bound = 4.0 * std::sqrt(o.sigma2) / std::sqrt(static_cast<double>(o.draws));
  auto ref = trunc_gauss_inverse_cdf(o.sigma2, o.gamma, o.draws, o.seed);
  r.ks = ks_two_sample(xs, ref);
  r.ks_critical = tolerance::ks_two_sample_critical(xs.size(), ref.size());

  const auto lap = LaplaceParams::make(o.laplace_scale);
  const double cut = o.laplace_scale * std::log(100.0);
  std::uint64_t tail = 0;
  for (std::uint64_t k = 0; k < o.draws; ++k) {
    if (std::abs(sample_laplace(lap, rng)) > cut) ++tail;
  }
  r.tail = static_cast<double>(tail) / static_cast<double>(o.draws);
  return r;
}

nlohmann::json to_json(const NoiseTestResult& r) {
  return {
      {"draws", r.draws},
      {"trunc_gauss",
       {{"outside", r.outside},
        {"mean", r.mean},
        {"mean_bound", r.mean_bound},
        {"ks", r.ks},
        {"ks_critical", r.ks_critical},
        {"ok", r.trunc_ok()}}},
      {"laplace",
       {{"tail", r.tail}, {"target", r.tail_target}, {"allowance", r.tail_allowance}, {"ok", r.laplace_ok()}}},
      {"ok", r.ok()},
  };
}

}  // namespace everlast::cli
