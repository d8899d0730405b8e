#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "everlast/core.hpp"
#include "everlast/report.hpp"
#include "everlast/run_config.hpp"

namespace everlast {

/// Probe count of the sign-aggregation attacker, frozen from the calibration
/// oracle (tests/fixtures/attack_calibration.json).
inline constexpr std::uint64_t kCalibratedProbes = 5500;
/// Uniform domain size on which the calibrated attack is run.
inline constexpr std::size_t kAttackDomainSize = 16384;
/// Sample size of the unprotected baseline in the attack comparison.
inline constexpr std::uint64_t kNaiveSampleSize = 500;

/// Shared, immutable inputs of every trial of one campaign.
struct CampaignContext {
  std::shared_ptr<const Distribution> distribution;
  /// Explicit query tables per strategy (empty when generated per trial).
  std::vector<std::vector<QueryPtr>> fixed_queries;
};

/// Loads the distribution and query files and checks that the mechanism is
/// feasible. Throws ConfigError before any trial would run.
CampaignContext prepare_campaign(const RunConfig& config);

struct TrialOptions {
  bool csv = false;
  bool events = false;
  bool capture_queries = false;
};

struct TrialOutput {
  TrialRecord record;
  std::string csv;     // rows without header
  std::string events;  // JSONL
  /// Per strategy, in submission order: FNV-1a hash of (id, values) of each query.
  std::vector<std::vector<std::uint64_t>> query_hashes;
};

/// One trial. Streams: mechanism kMechanism, schedule kSchedule, strategy j
/// kUserBase + j, all derived from (config.seed, trial).
TrialOutput run_trial(const RunConfig& config, const CampaignContext& ctx, std::uint64_t trial,
                      const TrialOptions& options = {});

struct CampaignResult {
  std::vector<TrialRecord> records;
  AggregateReport aggregate;
  std::vector<std::filesystem::path> written;
};

/// Runs config.trials trials (config.threads at a time) and writes whichever
/// of CSV / report / events the output spec names. Output is identical for
/// any thread count.
CampaignResult run_campaign(const RunConfig& config);

/// CSV header line (with trailing newline).
std::string csv_header();

/// Canned attack comparison: the calibrated attacker alone against
/// `mechanism` on the uniform kAttackDomainSize domain. No files written.
RunConfig attack_demo_config(MechanismKind mechanism, std::uint64_t trials, std::uint64_t seed,
                             std::uint64_t probes = kCalibratedProbes);

}  // namespace everlast
