#pragma once

#include <cstdint>
#include <random>

namespace everlast {

/// Every sampler takes one of these explicitly; there is no global generator.
using Rng = std::mt19937_64;

/// Purpose tags for per-trial streams. User streams are kUserBase + index,
/// pre-generated query tables kTableBase + index.
enum class StreamTag : std::uint64_t {
  kData = 1,
  kMechanism = 2,
  kSchedule = 3,
  kUserBase = 1000,
  kTableBase = 2000,  // + strategy index: pre-generated query tables
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for stream `tag` of trial `trial` under `master`:
///   splitmix64(splitmix64(master ^ splitmix64(trial)) + tag)
/// Streams for distinct (trial, tag) pairs are independent for practical
/// purposes and do not depend on how many draws any other stream made.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t tag) noexcept;

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, StreamTag tag) noexcept {
  return derive_seed(master, trial, static_cast<std::uint64_t>(tag));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t trial, std::uint64_t tag) {
  return Rng{derive_seed(master, trial, tag)};
}

inline Rng make_stream(std::uint64_t master, std::uint64_t trial, StreamTag tag) {
  return Rng{derive_seed(master, trial, tag)};
}

/// Uniform double in the open interval (0, 1).
double open_unit(Rng& rng);

}  // namespace everlast
