#include "everlast/strategies.hpp"

#include <algorithm>
#include <random>

#include "everlast/errors.hpp"

namespace everlast {

namespace {

QueryPtr aggregate(const std::string& id, const DomainPtr& domain, const std::vector<std::int64_t>& votes) {
  std::vector<double> values(votes.size());
  for (std::size_t e = 0; e < votes.size(); ++e) values[e] = votes[e] > 0 ? 1.0 : 0.0;
  return std::make_shared<const Query>(id, domain, std::move(values));
}

bool is_binary(const Query& q) {
  for (double v : q.values()) {
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

}  // namespace

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kNonAdaptive: return "non_adaptive";
    case StrategyKind::kAutonomous: return "autonomous";
    case StrategyKind::kArbitrary: return "arbitrary";
  }
  return "unknown";
}

PreregisteredUser::PreregisteredUser(std::string tag, std::vector<QueryPtr> queries)
    : tag_(std::move(tag)), queries_(std::move(queries)) {
  for (const auto& q : queries_) {
    if (!q) throw ConfigError("preregistered user '" + tag_ + "' has a null query");
  }
}

std::unique_ptr<PreregisteredUser> PreregisteredUser::random(std::string tag, DomainPtr domain, std::uint64_t count,
                                                             ValueLaw law, Rng& rng) {
  if (!domain) throw ConfigError("preregistered user needs a domain");
  std::vector<QueryPtr> queries;
  queries.reserve(count);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t j = 0; j < count; ++j) {
    std::vector<double> values;
    if (law == ValueLaw::kBernoulli) {
      values = random_binary_table(domain->size(), rng);
    } else {
      values.resize(domain->size());
      for (auto& v : values) v = unit(rng);
    }
    queries.push_back(std::make_shared<const Query>(tag + "/q" + std::to_string(j), domain, std::move(values)));
  }
  return std::make_unique<PreregisteredUser>(std::move(tag), std::move(queries));
}

QueryPtr PreregisteredUser::next_query(std::span<const HistoryEntry> visible, Rng&) {
  if (!visible.empty()) throw UsageError("non-adaptive user '" + tag_ + "' was shown history");
  if (next_ >= queries_.size()) throw UsageError("preregistered user '" + tag_ + "' has no queries left");
  return queries_[next_++];
}

std::vector<std::uint64_t> random_bits(std::size_t size, Rng& rng) {
  std::vector<std::uint64_t> words((size + 63) / 64);
  for (auto& w : words) w = rng();
  return words;
}

std::vector<double> random_binary_table(std::size_t size, Rng& rng) {
  std::vector<double> values(size);
  for (std::size_t base = 0; base < size; base += 64) {
    const std::uint64_t word = rng();
    const std::size_t len = std::min<std::size_t>(64, size - base);
    for (std::size_t b = 0; b < len; ++b) values[base + b] = static_cast<double>((word >> b) & 1u);
  }
  return values;
}

SignAggregationAttacker::SignAggregationAttacker(std::string tag, DomainPtr domain, std::uint64_t probes)
    : tag_(std::move(tag)), domain_(std::move(domain)), probes_(probes) {
  if (!domain_) throw ConfigError("attacker needs a domain");
  if (probes_ < 1) throw ConfigError("attacker needs k >= 1 probes");
  votes_.assign(domain_->size(), 0);
}

void SignAggregationAttacker::absorb(std::span<const HistoryEntry> visible) {
  if (issued_ == 0) return;
  if (visible.empty()) throw UsageError("attacker '" + tag_ + "' lost its own history");
  const auto& last = visible.back();
  if (last.query_id != tag_ + "/probe" + std::to_string(issued_ - 1)) {
    throw UsageError("attacker '" + tag_ + "' was shown an entry it did not submit");
  }
  // A probe the mechanism refused to answer carries no vote.
  if (last.answer && *last.answer > 0.5) {
    ++selected_;
    for (std::size_t e = 0; e < votes_.size(); ++e) {
      votes_[e] += 2 * static_cast<std::int64_t>((last_probe_[e / 64] >> (e % 64)) & 1u) - 1;
    }
  }
}

QueryPtr SignAggregationAttacker::next_query(std::span<const HistoryEntry> visible, Rng& rng) {
  if (issued_ > probes_) throw UsageError("attacker '" + tag_ + "' has no queries left");
  absorb(visible);
  if (issued_ == probes_) {
    ++issued_;
    last_probe_.clear();
    return aggregate(tag_ + "/aggregate", domain_, votes_);
  }
  last_probe_ = random_bits(domain_->size(), rng);
  auto q = std::make_shared<const Query>(
      Query::from_bits(tag_ + "/probe" + std::to_string(issued_), domain_, last_probe_));
  ++issued_;
  return q;
}

CollusionAttacker::CollusionAttacker(std::string tag, DomainPtr domain, std::uint64_t probes)
    : tag_(std::move(tag)), domain_(std::move(domain)), probes_(probes) {
  if (!domain_) throw ConfigError("attacker needs a domain");
  if (probes_ < 1) throw ConfigError("attacker needs k >= 1 probes");
}

QueryPtr CollusionAttacker::next_query(std::span<const HistoryEntry> visible, Rng& rng) {
  if (issued_ > probes_) throw UsageError("attacker '" + tag_ + "' has no queries left");
  if (issued_ == probes_) {
    ++issued_;
    std::vector<std::int64_t> votes(domain_->size(), 0);
    for (const auto& h : visible) {
      if (!h.query || !h.answer || *h.answer <= 0.5) continue;
      if (!h.query->domain()->same_as(*domain_) || !is_binary(*h.query)) continue;
      const auto values = h.query->values();
      for (std::size_t e = 0; e < votes.size(); ++e) votes[e] += values[e] > 0.0 ? 1 : -1;
    }
    return aggregate(tag_ + "/aggregate", domain_, votes);
  }
  auto q = std::make_shared<const Query>(
      Query::from_bits(tag_ + "/probe" + std::to_string(issued_), domain_, random_bits(domain_->size(), rng)));
  ++issued_;
  return q;
}

}  // namespace everlast
