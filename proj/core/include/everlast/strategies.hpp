#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "everlast/core.hpp"

namespace everlast {

enum class StrategyKind { kNonAdaptive, kAutonomous, kArbitrary };

std::string to_string(StrategyKind kind);

/// One submission as shown back to strategies.
struct HistoryEntry {
  std::uint64_t seq = 0;        // 0-based position in the trial's submission order
  std::size_t user = 0;         // index of the submitting strategy
  std::string query_id;
  QueryPtr query;               // set only when the harness retains queries
  std::optional<double> answer;
  double price = 0.0;
  std::uint64_t round = 0;
};

/// A user model. Implementations are untrusted: the harness decides what
/// part of the history they are given.
///   NonAdaptive  nothing
///   Autonomous   its own entries only
///   Arbitrary    every entry
class UserStrategy {
 public:
  virtual ~UserStrategy() = default;

  [[nodiscard]] virtual const std::string& tag() const = 0;
  [[nodiscard]] virtual StrategyKind kind() const = 0;
  /// Total number of queries this strategy will submit.
  [[nodiscard]] virtual std::uint64_t planned_queries() const = 0;
  /// Next query; called exactly planned_queries() times.
  virtual QueryPtr next_query(std::span<const HistoryEntry> visible, Rng& rng) = 0;
};

using StrategyPtr = std::unique_ptr<UserStrategy>;

enum class ValueLaw { kUniform, kBernoulli };

/// Non-adaptive analyst with a query list fixed at construction.
class PreregisteredUser final : public UserStrategy {
 public:
  PreregisteredUser(std::string tag, std::vector<QueryPtr> queries);
  /// `count` random tables over `domain`, values drawn from `law`.
  static std::unique_ptr<PreregisteredUser> random(std::string tag, DomainPtr domain, std::uint64_t count,
                                                   ValueLaw law, Rng& rng);

  [[nodiscard]] const std::string& tag() const override { return tag_; }
  [[nodiscard]] StrategyKind kind() const override { return StrategyKind::kNonAdaptive; }
  [[nodiscard]] std::uint64_t planned_queries() const override { return queries_.size(); }
  QueryPtr next_query(std::span<const HistoryEntry> visible, Rng& rng) override;

  [[nodiscard]] const std::vector<QueryPtr>& queries() const noexcept { return queries_; }

 private:
  std::string tag_;
  std::vector<QueryPtr> queries_;
  std::size_t next_ = 0;
};

/// ceil(size / 64) words of `rng`; bit e % 64 of word e / 64 is element e.
std::vector<std::uint64_t> random_bits(std::size_t size, Rng& rng);
/// Uniform {0,1} table over `size` elements (the unpacked random_bits).
std::vector<double> random_binary_table(std::size_t size, Rng& rng);

/// Autonomous overfitting attacker. Phase 1 submits k random {0,1} probes;
/// phase 2 submits q*(x) = [sum over probes j with a_j > 1/2 of (2 q_j(x) - 1) > 0].
class SignAggregationAttacker final : public UserStrategy {
 public:
  SignAggregationAttacker(std::string tag, DomainPtr domain, std::uint64_t probes);

  [[nodiscard]] const std::string& tag() const override { return tag_; }
  [[nodiscard]] StrategyKind kind() const override { return StrategyKind::kAutonomous; }
  [[nodiscard]] std::uint64_t planned_queries() const override { return probes_ + 1; }
  QueryPtr next_query(std::span<const HistoryEntry> visible, Rng& rng) override;

  [[nodiscard]] std::uint64_t probes() const noexcept { return probes_; }
  [[nodiscard]] std::uint64_t selected() const noexcept { return selected_; }

 private:
  void absorb(std::span<const HistoryEntry> visible);

  std::string tag_;
  DomainPtr domain_;
  std::uint64_t probes_;
  std::uint64_t issued_ = 0;
  std::uint64_t selected_ = 0;
  std::vector<std::uint64_t> last_probe_;  // packed bits
  std::vector<std::int64_t> votes_;
};

/// Arbitrary adversary: same aggregation, but over every answered {0,1}-valued
/// query in the full history (its own probes and everyone else's).
class CollusionAttacker final : public UserStrategy {
 public:
  CollusionAttacker(std::string tag, DomainPtr domain, std::uint64_t probes);

  [[nodiscard]] const std::string& tag() const override { return tag_; }
  [[nodiscard]] StrategyKind kind() const override { return StrategyKind::kArbitrary; }
  [[nodiscard]] std::uint64_t planned_queries() const override { return probes_ + 1; }
  QueryPtr next_query(std::span<const HistoryEntry> visible, Rng& rng) override;

 private:
  std::string tag_;
  DomainPtr domain_;
  std::uint64_t probes_;
  std::uint64_t issued_ = 0;
};

}  // namespace everlast
