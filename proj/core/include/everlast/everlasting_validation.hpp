#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "everlast/core.hpp"
#include "everlast/ledger.hpp"
#include "everlast/validation_round.hpp"

namespace everlast {

__extension__ typedef unsigned __int128 WideCount;

/// Largest dataset (per half) the simulator will actually draw.
inline constexpr std::uint64_t kMaxDatasetSize = std::uint64_t{1} << 27;

struct MechanismConfig {
  double tau = 0.4;
  double beta = 0.1;
  double sample_unit_cost = 1.0;
  /// Charge the low price again when a query that halted a round is answered
  /// by the successor round. Off only for sensitivity analysis.
  bool charge_low_price_on_resubmit = true;

  void validate() const;
};

/// Gamma = 36 ln(8/beta) / tau^2, the externally funded initial budget.
double initial_budget(double tau, double beta);
/// N_0 = ceil(Gamma / 2).
std::uint64_t initial_round_size(double tau, double beta);
/// 96 / (tau^2 i), i >= 1.
double low_price(double tau, std::uint64_t i);
/// N_t = 3^t N_0, exact (throws ConfigError beyond 128 bits).
WideCount ev_round_size(std::uint64_t n0, unsigned t);
/// beta_t = 2^-t beta / 2.
double ev_round_beta(double beta, unsigned t);
/// (96/tau^2)(1 + ln M): worst-case low-price total for M queries.
double low_price_total_bound(double tau, std::uint64_t m);

enum class EvEventKind { kAnswered, kHalted, kPurchased };

/// One record of the per-run event stream.
struct EvEvent {
  EvEventKind kind = EvEventKind::kAnswered;
  std::uint64_t i = 0;        // global query index
  std::uint64_t t = 0;        // round
  std::optional<double> a;    // answer (answered events)
  double p = 0.0;             // charge attached to this event
  std::uint64_t n_t = 0;      // dataset size of round t (per half)
  double capital = 0.0;       // ledger capital after the event
  bool premature = false;     // halted events
  bool revenue_lemma_ok = true;  // natural-end halts: capital >= 6 N_t before charging
};

std::string to_string(EvEventKind kind);
/// {event, i, t, a, p, N_t, capital}
nlohmann::json to_json(const EvEvent& e);

struct EvSubmission {
  double answer = 0.0;
  double price = 0.0;        // low + high charges for this submission
  double low_charge = 0.0;
  double high_charge = 0.0;
  std::uint64_t index = 0;   // global index i the answer was priced at
  std::uint64_t round = 0;   // round that produced the answer
  unsigned halts = 0;        // rounds ended by this submission
  unsigned premature_halts = 0;
  double mean_s = 0.0;       // E_S[q] in the answering round
  double mean_t = 0.0;       // E_T[q] in the answering round
  double noise = 0.0;
};

/// Chained validation rounds with two-tier pricing.
///
/// Answered queries pay 96/(tau^2 i). A query that halts round t pays
/// max(0, 6 N_t - capital), the mechanism buys S_{t+1}, T_{t+1} of size
/// N_{t+1} = 3 N_t at beta_{t+1} = beta_t / 2, and the same query is passed
/// to the new round with the same index i.
class EverlastingValidation {
 public:
  /// Seeds the ledger with Gamma and buys S_0, T_0. Throws ConfigError if
  /// round 0 cannot answer a single query.
  EverlastingValidation(MechanismConfig config, std::shared_ptr<const Distribution> dist, Rng& rng);

  EvSubmission submit(const Query& q, Rng& rng);

  [[nodiscard]] const MechanismConfig& config() const noexcept { return config_; }
  [[nodiscard]] const Ledger& ledger() const noexcept { return ledger_; }
  [[nodiscard]] const ValidationRound& current_round() const noexcept { return *round_; }
  [[nodiscard]] std::uint64_t round_index() const noexcept { return t_; }
  [[nodiscard]] std::uint64_t next_index() const noexcept { return next_i_; }
  [[nodiscard]] std::uint64_t n0() const noexcept { return n0_; }
  [[nodiscard]] double budget() const noexcept { return gamma_; }
  [[nodiscard]] std::uint64_t natural_ends() const noexcept { return natural_ends_; }
  [[nodiscard]] std::uint64_t premature_halts() const noexcept { return premature_halts_; }
  [[nodiscard]] std::uint64_t revenue_lemma_failures() const noexcept { return lemma_failures_; }
  /// Sum of answers across rounds that exceeded each round's answer cap.
  [[nodiscard]] std::uint64_t cap_overruns() const noexcept { return cap_overruns_; }

  /// Datasets of retired rounds (S_t then T_t), released for unrestricted use.
  [[nodiscard]] const std::vector<Dataset>& released_data() const noexcept { return released_; }

  /// Events since the last call, in order.
  std::vector<EvEvent> take_events();

 private:
  void start_round(std::uint64_t n, double beta, Rng& rng);

  MechanismConfig config_;
  std::shared_ptr<const Distribution> dist_;
  Ledger ledger_;
  double gamma_;
  std::uint64_t n0_;
  std::uint64_t t_ = 0;
  std::uint64_t n_t_;
  double beta_t_;
  std::unique_ptr<ValidationRound> round_;
  std::uint64_t next_i_ = 1;
  std::uint64_t natural_ends_ = 0;
  std::uint64_t premature_halts_ = 0;
  std::uint64_t lemma_failures_ = 0;
  std::uint64_t cap_overruns_ = 0;
  std::vector<Dataset> released_;
  std::vector<EvEvent> events_;
};

}  // namespace everlast
