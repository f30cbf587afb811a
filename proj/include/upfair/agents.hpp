#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "upfair/messages.hpp"
#include "upfair/solvers.hpp"
#include "upfair/utility.hpp"

namespace upfair {

enum class DecayKind { none, exponential, rational };

// Cap on how far a bid may move in one iteration:
//   exponential  dw(n) = l1 * exp(-n / l2)
//   rational     dw(n) = l3 / n
//   none         no cap
struct DecayPolicy {
  DecayKind kind = DecayKind::none;
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;

  static DecayPolicy none() { return {}; }
  static DecayPolicy exponential(double l1, double l2) { return {DecayKind::exponential, l1, l2, 0.0}; }
  static DecayPolicy rational(double l3) { return {DecayKind::rational, 0.0, 0.0, l3}; }

  void validate() const;
};

// +inf for DecayKind::none.
double decay_value(const DecayPolicy& policy, std::int64_t n);

// previous + sign(candidate - previous) * cap when the move exceeds cap.
double clamp_bid(double previous, double candidate, double cap) noexcept;

struct UeState {
  UtilityParams params;
  double last_bid = 0.0;       // w_i(n-1)
  double current_bid = 0.0;    // w_i(n)
  double current_power = 0.0;  // current_bid / price after the first price
};

// One UE iteration: best response to `price`, bid w = price * P, then the
// decay clamp against the previous bid. Returns the bid for round n + 1.
BidMessage ue_step(UeState& state, std::int64_t user_id, double price, std::int64_t n,
                   const DecayPolicy& policy, const BestResponseConfig& cfg = {});

// A UE endpoint: owns its state and the clamp schedule. Clamping is applied
// for iterations n >= decay_start.
class UeAgent {
 public:
  UeAgent(std::int64_t user_id, UtilityParams params, double initial_bid,
          DecayPolicy decay = {}, std::int64_t decay_start = 1,
          BestResponseConfig solver = {});

  std::int64_t user_id() const noexcept { return user_id_; }
  const UeState& state() const noexcept { return state_; }

  // Bid for round 1.
  BidMessage initial_bid() const;
  BidMessage on_price(const PriceMessage& price);
  // Final allocation w_i / p.
  double on_stop(const StopMessage& stop) const;

 private:
  std::int64_t user_id_;
  UeState state_;
  DecayPolicy decay_;
  std::int64_t decay_start_;
  BestResponseConfig solver_;
};

struct BsState {
  double total_power = 0.0;
  double delta = 1e-3;
  std::vector<double> previous_bids;  // w_i(n-1); zeros before round 1
  double price = 0.0;                 // 0 until the first price is set
  std::int64_t round = 0;
};

BsState make_bs_state(std::size_t user_count, double total_power, double delta);

struct PriceDecision {
  double price;
};

struct StopDecision {
  double price;
  std::vector<double> powers;
};

using BsDecision = std::variant<PriceDecision, StopDecision>;

// BS round: stop when every bid moved by less than delta since the previous
// round (never before a price exists), otherwise set p = sum(w) / P_T.
BsDecision bs_step(BsState& state, std::span<const double> bids);

}  // namespace upfair
