#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "everlast/core.hpp"
#include "everlast/strategies.hpp"

namespace everlast {

enum class MechanismKind { kEV, kTO, kThresholdoutOnly, kNaiveBaseline };
enum class ScheduleKind { kSequential, kRoundRobin, kRandom };
enum class StrategyType { kPreregistered, kSignAggregation, kCollusion };

std::string to_string(MechanismKind kind);
std::string to_string(ScheduleKind kind);
std::string to_string(StrategyType type);
MechanismKind parse_mechanism(const std::string& s);
ScheduleKind parse_schedule(const std::string& s);
StrategyType parse_strategy_type(const std::string& s);

/// Union of the parameters of all four mechanisms; each reads what it needs.
struct MechanismParams {
  double tau = 0.4;
  double beta = 0.1;
  double sample_unit_cost = 1.0;                 // EV
  bool charge_low_price_on_resubmit = true;      // EV
  std::uint64_t n = 500;                         // TO: N_0, ThresholdoutOnly and NaiveBaseline: |S| = |T|
  double p = 0.5;                                // TO
  double analysis_constant = 9984.0;             // TO
  double m = 200.0;                              // ThresholdoutOnly allotment
  std::uint64_t budget = 10;                     // ThresholdoutOnly overfitting budget
};

struct DistributionSpec {
  std::size_t domain_size = 64;                  // uniform over {0..domain_size-1} unless `file` is set
  std::optional<std::filesystem::path> file;     // structured-text distribution
};

struct StrategySpec {
  StrategyType type = StrategyType::kPreregistered;
  std::string tag;
  std::uint64_t queries = 0;                     // preregistered: count of random tables
  ValueLaw law = ValueLaw::kUniform;             // preregistered
  std::vector<std::filesystem::path> query_files;  // preregistered: explicit tables instead of random ones
  std::uint64_t probes = 0;                      // attackers: k
};

struct OutputSpec {
  std::filesystem::path dir = ".";
  std::optional<std::string> csv = "transcript.csv";
  std::optional<std::string> report = "report.json";
  std::optional<std::string> events = "events.jsonl";
};

/// Campaign description, read from a JSON file.
struct RunConfig {
  MechanismKind mechanism = MechanismKind::kEV;
  MechanismParams params;
  DistributionSpec distribution;
  std::vector<StrategySpec> strategies;
  ScheduleKind schedule = ScheduleKind::kRoundRobin;
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  OutputSpec output;

  /// Structural checks (trials >= 1, tags unique and non-empty, every
  /// strategy plans at least one query). Mechanism feasibility is checked by
  /// the campaign runner before any trial.
  void validate() const;
};

/// Parses a run config. Unknown keys are errors. Relative paths inside the
/// file resolve against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

/// Output directory after applying the EVERLAST_OUTPUT_DIR override.
std::filesystem::path resolve_output_dir(const OutputSpec& out);

}  // namespace everlast
