#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace everlast::cli {

struct NoiseTestOptions {
  std::uint64_t draws = 1'000'000;
  std::uint64_t seed = 7;
  double sigma2 = 2.974200093419528e-4;  // round(0.4, 0.1, 500)
  double gamma = 0.1;
  double laplace_scale = 1.0;
};

struct NoiseTestResult {
  std::uint64_t draws = 0;
  // truncated Gaussian
  std::uint64_t outside = 0;           // draws with |x| > gamma
  double mean = 0.0;
  double mean_bound = 0.0;             // 4 sigma / sqrt(draws)
  double ks = 0.0;                     // two-sample KS against inverse-CDF draws
  double ks_critical = 0.0;
  // Laplace
  double tail = 0.0;                   // empirical P(|X| > b ln 100)
  double tail_target = 0.01;
  double tail_allowance = 0.003;

  [[nodiscard]] bool trunc_ok() const { return outside == 0 && mean <= mean_bound && mean >= -mean_bound && ks < ks_critical; }
  [[nodiscard]] bool laplace_ok() const { return tail >= tail_target - tail_allowance && tail <= tail_target + tail_allowance; }
  [[nodiscard]] bool ok() const { return trunc_ok() && laplace_ok(); }
};

/// Inverse-CDF draws from N(0, sigma2) truncated to [-gamma, gamma]; the
/// reference sample for the KS comparison.
std::vector<double> trunc_gauss_inverse_cdf(double sigma2, double gamma, std::uint64_t draws, std::uint64_t seed);

/// Sup distance between the empirical CDFs of two samples (sorted in place).
double ks_two_sample(std::vector<double>& a, std::vector<double>& b);

NoiseTestResult run_noise_test(const NoiseTestOptions& options);
nlohmann::json to_json(const NoiseTestResult& r);

}  // namespace everlast::cli
