#include "everlast/rng.hpp"

namespace everlast {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t tag) noexcept {
  return splitmix64(splitmix64(master ^ splitmix64(trial)) + tag);
}

double open_unit(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = 0.0;
  do {
    u = unit(rng);
  } while (u <= 0.0);
  return u;
}

}  // namespace everlast
