#include "everlast/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "everlast/errors.hpp"
#include "everlast/tolerances.hpp"

namespace everlast {

Ledger::Ledger(double unit_cost) : unit_cost_(unit_cost) {
  if (!(unit_cost > 0.0) || !std::isfinite(unit_cost)) throw ConfigError("sample unit cost must be > 0");
  min_after_purchase_ = std::numeric_limits<double>::infinity();
}

void Ledger::seed(double external_subsidy, double rounding_grant) {
  if (seeded_) throw UsageError("ledger already seeded");
  if (!(external_subsidy >= 0.0) || !(rounding_grant >= 0.0)) throw ConfigError("ledger seed must be >= 0");
  seeded_ = true;
  subsidy_ = external_subsidy;
  grant_ = rounding_grant;
  capital_.add(external_subsidy);
  capital_.add(rounding_grant);
}

void Ledger::collect(double amount) {
  if (!(amount >= 0.0) || !std::isfinite(amount)) throw UsageError("charges must be finite and >= 0");
  capital_.add(amount);
  revenue_.add(amount);
}

double Ledger::top_up_to(double cost) {
  const double charge = std::max(0.0, cost - capital());
  if (charge > 0.0) {
    revenue_.add(charge);
    capital_.reset(cost);
  }
  return charge;
}

void Ledger::purchase(std::uint64_t round, std::uint64_t samples) {
  if (!seeded_) throw UsageError("ledger must be seeded before purchases");
  const double cost = static_cast<double>(samples) * unit_cost_;
  capital_.add(-cost);
  spent_.add(cost);
  samples_ += samples;
  purchases_.push_back({round, samples, cost});
  const double c = capital();
  min_after_purchase_ = std::min(min_after_purchase_, c);
  if (c < -tolerance::kLedgerAbs) ++negative_events_;
}

double Ledger::conservation_residual(double revenue) const {
  CompensatedSum s;
  s.add(subsidy_);
  s.add(grant_);
  s.add(revenue);
  for (const auto& p : purchases_) s.add(-p.cost);
  s.add(-capital());
  return s.value();
}

}  // namespace everlast
