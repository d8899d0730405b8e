#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "everlast/rng.hpp"

namespace everlast {

inline constexpr std::size_t kMaxDomainSize = std::size_t{1} << 20;

/// Finite, ordered sample space. Elements are addressed by index; labels are
/// either explicit strings or the decimal index ("0", "1", ...).
class Domain {
 public:
  /// Domain {0, ..., size-1} with implicit integer labels.
  static std::shared_ptr<const Domain> integers(std::size_t size);
  /// Domain with explicit labels; labels must be distinct.
  static std::shared_ptr<const Domain> labeled(std::vector<std::string> labels);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] std::string label(std::size_t index) const;
  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view label) const;

  /// Same elements in the same order.
  [[nodiscard]] bool same_as(const Domain& other) const;

 private:
  Domain(std::size_t size, std::vector<std::string> labels);

  std::size_t size_;
  std::vector<std::string> labels_;  // empty for integer domains
  std::unordered_map<std::string, std::size_t> lookup_;
};

using DomainPtr = std::shared_ptr<const Domain>;

/// Probability table over a Domain.
class Distribution {
 public:
  Distribution(DomainPtr domain, std::vector<double> probs);

  static Distribution uniform(DomainPtr domain);
  static Distribution point_mass(DomainPtr domain, std::size_t index);

  [[nodiscard]] const DomainPtr& domain() const noexcept { return domain_; }
  [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }
  [[nodiscard]] bool is_uniform() const noexcept { return uniform_; }

 private:
  DomainPtr domain_;
  std::vector<double> probs_;
  bool uniform_ = false;
};

/// Statistical query q: domain -> [0,1], stored as a value table.
class Query {
 public:
  Query(std::string id, DomainPtr domain, std::vector<double> values);

  /// {0,1} table from packed bits: element e is bit e % 64 of words[e / 64].
  static Query from_bits(std::string id, DomainPtr domain, std::span<const std::uint64_t> words);

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] const DomainPtr& domain() const noexcept { return domain_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator()(std::size_t element) const { return values_[element]; }
  /// Compensated sum of the value table, computed once.
  [[nodiscard]] double value_sum() const noexcept { return value_sum_; }

 private:
  std::string id_;
  DomainPtr domain_;
  std::vector<double> values_;
  double value_sum_ = 0.0;

  Query() = default;
};

using QueryPtr = std::shared_ptr<const Query>;

/// Multiset of domain element indices.
class Dataset {
 public:
  Dataset(DomainPtr domain, std::vector<std::uint32_t> samples);

  [[nodiscard]] const DomainPtr& domain() const noexcept { return domain_; }
  [[nodiscard]] std::span<const std::uint32_t> samples() const noexcept { return samples_; }
  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  /// Per-element multiplicities; empty unless the domain is smaller than the sample.
  [[nodiscard]] std::span<const std::uint32_t> counts() const noexcept { return counts_; }

 private:
  DomainPtr domain_;
  std::vector<std::uint32_t> samples_;
  std::vector<std::uint32_t> counts_;
};

/// (1/n) * sum over the dataset of q(x). Throws ConfigError on domain mismatch.
double empirical_mean(const Query& q, const Dataset& d);

/// Exact population mean sum_e p(e) q(e). Ground truth for every validity check.
double true_mean(const Query& q, const Distribution& dist);

/// n i.i.d. draws from dist. Throws ConfigError when n == 0.
Dataset sample_dataset(const Distribution& dist, std::size_t n, Rng& rng);

/// One submitted query as the outside world saw it.
struct TranscriptEntry {
  std::string query_id;
  std::optional<double> answer;  // empty only if the mechanism halted for good
  double price = 0.0;
  std::uint64_t round = 0;
  bool overfit = false;
  std::optional<std::string> user;
};

/// Submission-ordered record of (query, answer, price, round, overfit flag).
class Transcript {
 public:
  void append(TranscriptEntry entry);

  [[nodiscard]] std::span<const TranscriptEntry> entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  /// Total price paid by one user tag (compensated sum).
  [[nodiscard]] double cost_of(std::string_view user) const;
  /// Total price over all entries (compensated sum).
  [[nodiscard]] double total_price() const;

 private:
  std::vector<TranscriptEntry> entries_;
};

}  // namespace everlast
