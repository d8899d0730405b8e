#pragma once

#include <cstdint>
#include <vector>

#include "everlast/summation.hpp"

namespace everlast {

struct Purchase {
  std::uint64_t round;
  std::uint64_t samples;
  double cost;
};

/// Sample-cost accounting for one mechanism instance. All amounts are in
/// currency units; one sample costs `unit_cost`.
///
/// Conservation: external_subsidy + rounding_grant + revenue - spent == capital.
class Ledger {
 public:
  explicit Ledger(double unit_cost = 1.0);

  /// One-time seeding. `rounding_grant` covers the gap between the real-valued
  /// initial budget and the integer size of the first purchase.
  void seed(double external_subsidy, double rounding_grant = 0.0);

  /// Records revenue from a query charge.
  void collect(double amount);

  /// Charges exactly max(0, cost - capital) as revenue and returns it. Capital
  /// equals `cost` afterwards whenever the charge is positive.
  double top_up_to(double cost);

  /// Spends samples * unit_cost.
  void purchase(std::uint64_t round, std::uint64_t samples);

  [[nodiscard]] double unit_cost() const noexcept { return unit_cost_; }
  [[nodiscard]] double capital() const noexcept { return capital_.value(); }
  [[nodiscard]] double total_revenue() const noexcept { return revenue_.value(); }
  [[nodiscard]] double total_spent() const noexcept { return spent_.value(); }
  [[nodiscard]] double external_subsidy() const noexcept { return subsidy_; }
  [[nodiscard]] double rounding_grant() const noexcept { return grant_; }
  [[nodiscard]] std::uint64_t samples_bought() const noexcept { return samples_; }
  [[nodiscard]] const std::vector<Purchase>& purchases() const noexcept { return purchases_; }
  /// Purchases after which capital was below -tolerance::kLedgerAbs.
  [[nodiscard]] std::uint64_t negative_capital_events() const noexcept { return negative_events_; }
  /// Smallest capital observed right after any purchase.
  [[nodiscard]] double min_capital_after_purchase() const noexcept { return min_after_purchase_; }

  /// subsidy + grant + `revenue` - spent - capital. `revenue` is supplied by
  /// the caller (e.g. summed from a transcript) so the check is independent
  /// of the ledger's own revenue counter.
  [[nodiscard]] double conservation_residual(double revenue) const;

 private:
  double unit_cost_;
  bool seeded_ = false;
  double subsidy_ = 0.0;
  double grant_ = 0.0;
  CompensatedSum capital_;
  CompensatedSum revenue_;
  CompensatedSum spent_;
  std::uint64_t samples_ = 0;
  std::vector<Purchase> purchases_;
  std::uint64_t negative_events_ = 0;
  double min_after_purchase_ = 0.0;
};

}  // namespace everlast
