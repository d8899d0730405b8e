#include "everlast/core.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <charconv>
#include <cmath>
#include <random>

#include "everlast/errors.hpp"
#include "everlast/summation.hpp"
#include "everlast/tolerances.hpp"

namespace everlast {

namespace {

void check_domain_size(std::size_t size) {
  if (size == 0) throw ConfigError("domain must contain at least one element");
  if (size > kMaxDomainSize) {
    throw ConfigError("domain size " + std::to_string(size) + " exceeds the 2^20 cap");
  }
}

void check_same_domain(const Domain& a, const Domain& b, const char* what) {
  if (&a != &b && !a.same_as(b)) throw ConfigError(std::string(what) + ": domain mismatch");
}

}  // namespace

Domain::Domain(std::size_t size, std::vector<std::string> labels)
    : size_(size), labels_(std::move(labels)) {
  lookup_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!lookup_.emplace(labels_[i], i).second) {
      throw ConfigError("duplicate domain element '" + labels_[i] + "'");
    }
  }
}

std::shared_ptr<const Domain> Domain::integers(std::size_t size) {
  check_domain_size(size);
  return std::shared_ptr<const Domain>(new Domain(size, {}));
}

std::shared_ptr<const Domain> Domain::labeled(std::vector<std::string> labels) {
  check_domain_size(labels.size());
  const std::size_t n = labels.size();
  return std::shared_ptr<const Domain>(new Domain(n, std::move(labels)));
}

std::string Domain::label(std::size_t index) const {
  if (index >= size_) throw ConfigError("domain index out of range");
  return labels_.empty() ? std::to_string(index) : labels_[index];
}

std::optional<std::size_t> Domain::index_of(std::string_view label) const {
  if (labels_.empty()) {
    std::size_t value = 0;
    const auto* end = label.data() + label.size();
    const auto [ptr, ec] = std::from_chars(label.data(), end, value);
    if (ec != std::errc{} || ptr != end || value >= size_) return std::nullopt;
    return value;
  }
  const auto it = lookup_.find(std::string(label));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

bool Domain::same_as(const Domain& other) const {
  if (this == &other) return true;
  if (size_ != other.size_) return false;
  if (labels_.empty() && other.labels_.empty()) return true;
  for (std::size_t i = 0; i < size_; ++i) {
    if (label(i) != other.label(i)) return false;
  }
  return true;
}

Distribution::Distribution(DomainPtr domain, std::vector<double> probs)
    : domain_(std::move(domain)), probs_(std::move(probs)) {
  if (!domain_) throw ConfigError("distribution needs a domain");
  if (probs_.size() != domain_->size()) {
    throw ConfigError("distribution has " + std::to_string(probs_.size()) +
                      " probabilities for a domain of size " + std::to_string(domain_->size()));
  }
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("probabilities must be finite and >= 0");
  }
  const double total = compensated_sum(probs_);
  if (std::abs(total - 1.0) > tolerance::kProbSum) {
    throw ConfigError("probabilities sum to " + std::to_string(total) + ", not 1");
  }
  uniform_ = std::all_of(probs_.begin(), probs_.end(), [&](double p) { return p == probs_.front(); });
}

Distribution Distribution::uniform(DomainPtr domain) {
  if (!domain) throw ConfigError("distribution needs a domain");
  const std::size_t n = domain->size();
  return Distribution(std::move(domain), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(DomainPtr domain, std::size_t index) {
  if (!domain) throw ConfigError("distribution needs a domain");
  if (index >= domain->size()) throw ConfigError("point mass index out of range");
  std::vector<double> probs(domain->size(), 0.0);
  probs[index] = 1.0;
  return Distribution(std::move(domain), std::move(probs));
}

Query::Query(std::string id, DomainPtr domain, std::vector<double> values)
    : id_(std::move(id)), domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw ConfigError("query needs a domain");
  if (values_.size() != domain_->size()) {
    throw ConfigError("query '" + id_ + "' has " + std::to_string(values_.size()) +
                      " values for a domain of size " + std::to_string(domain_->size()));
  }
  bool in_range = true;
  std::uint64_t ones = 0;
  std::uint64_t zeros = 0;
  for (double v : values_) {
    in_range &= (v >= 0.0) & (v <= 1.0);
    ones += v == 1.0;
    zeros += v == 0.0;
  }
  if (!in_range) throw ConfigError("query '" + id_ + "' has a value outside [0,1]");
  // {0,1} tables sum exactly as an integer count.
  value_sum_ = ones + zeros == values_.size() ? static_cast<double>(ones) : compensated_sum(values_);
}

Query Query::from_bits(std::string id, DomainPtr domain, std::span<const std::uint64_t> words) {
  if (!domain) throw ConfigError("query needs a domain");
  const std::size_t size = domain->size();
  if (words.size() != (size + 63) / 64) throw ConfigError("query '" + id + "': bit table does not match the domain");
  Query q;
  q.id_ = std::move(id);
  q.domain_ = std::move(domain);
  q.values_.resize(size);
  std::uint64_t ones = 0;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::size_t base = w * 64;
    const std::size_t len = std::min<std::size_t>(64, size - base);
    const std::uint64_t word = len == 64 ? words[w] : words[w] & ((std::uint64_t{1} << len) - 1);
    for (std::size_t b = 0; b < len; ++b) q.values_[base + b] = static_cast<double>((word >> b) & 1u);
    ones += static_cast<std::uint64_t>(std::popcount(word));
  }
  q.value_sum_ = static_cast<double>(ones);
  return q;
}

Dataset::Dataset(DomainPtr domain, std::vector<std::uint32_t> samples)
    : domain_(std::move(domain)), samples_(std::move(samples)) {
  if (!domain_) throw ConfigError("dataset needs a domain");
  if (samples_.empty()) throw ConfigError("dataset must contain at least one sample");
  const auto limit = domain_->size();
  for (auto s : samples_) {
    if (s >= limit) throw ConfigError("dataset sample index out of range");
  }
  if (limit < samples_.size()) {
    counts_.assign(limit, 0);
    for (auto s : samples_) ++counts_[s];
  }
}

double empirical_mean(const Query& q, const Dataset& d) {
  check_same_domain(*q.domain(), *d.domain(), "empirical_mean");
  const auto values = q.values();
  CompensatedSum sum;
  if (!d.counts().empty()) {
    const auto counts = d.counts();
    for (std::size_t e = 0; e < counts.size(); ++e) {
      if (counts[e] != 0) sum.add(static_cast<double>(counts[e]) * values[e]);
    }
  } else {
    for (auto s : d.samples()) sum.add(values[s]);
  }
  const double mean = sum.value() / static_cast<double>(d.size());
  assert(mean >= 0.0 && mean <= 1.0 + 1e-15);
  return std::min(mean, 1.0);
}

double true_mean(const Query& q, const Distribution& dist) {
  check_same_domain(*q.domain(), *dist.domain(), "true_mean");
  const auto values = q.values();
  double mean = 0.0;
  if (dist.is_uniform()) {
    mean = q.value_sum() / static_cast<double>(values.size());
  } else {
    const auto probs = dist.probs();
    CompensatedSum sum;
    for (std::size_t e = 0; e < values.size(); ++e) sum.add(probs[e] * values[e]);
    mean = sum.value();
  }
  assert(mean >= -1e-15 && mean <= 1.0 + 1e-12);
  return std::clamp(mean, 0.0, 1.0);
}

Dataset sample_dataset(const Distribution& dist, std::size_t n, Rng& rng) {
  if (n == 0) throw ConfigError("sample_dataset: n must be >= 1");
  std::vector<std::uint32_t> samples(n);
  const auto size = dist.domain()->size();
  if (dist.is_uniform()) {
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(size - 1));
    for (auto& s : samples) s = pick(rng);
  } else {
    const auto probs = dist.probs();
    std::discrete_distribution<std::uint32_t> pick(probs.begin(), probs.end());
    for (auto& s : samples) s = pick(rng);
  }
  return Dataset(dist.domain(), std::move(samples));
}

void Transcript::append(TranscriptEntry entry) {
  if (!(entry.price >= 0.0)) throw UsageError("transcript prices must be >= 0");
  entries_.push_back(std::move(entry));
}

double Transcript::cost_of(std::string_view user) const {
  CompensatedSum sum;
  for (const auto& e : entries_) {
    if (e.user && *e.user == user) sum.add(e.price);
  }
  return sum.value();
}

double Transcript::total_price() const {
  CompensatedSum sum;
  for (const auto& e : entries_) sum.add(e.price);
  return sum.value();
}

}  // namespace everlast
