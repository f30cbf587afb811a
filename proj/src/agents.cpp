#include "upfair/agents.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "upfair/errors.hpp"

namespace upfair {

void DecayPolicy::validate() const {
  switch (kind) {
    case DecayKind::none:
      return;
    case DecayKind::exponential:
      if (!(l1 > 0.0) || !(l2 > 0.0)) throw DomainError("exponential decay needs l1 > 0 and l2 > 0");
      return;
    case DecayKind::rational:
      if (!(l3 > 0.0)) throw DomainError("rational decay needs l3 > 0");
      return;
  }
}

double decay_value(const DecayPolicy& policy, std::int64_t n) {
  if (n < 1) throw DomainError("decay_value: iteration must be >= 1");
  const auto x = static_cast<double>(n);
  switch (policy.kind) {
    case DecayKind::exponential:
      return policy.l1 * std::exp(-x / policy.l2);
    case DecayKind::rational:
      return policy.l3 / x;
    case DecayKind::none:
      break;
  }
  return std::numeric_limits<double>::infinity();
}

double clamp_bid(double previous, double candidate, double cap) noexcept {
  const double step = candidate - previous;
  if (std::abs(step) <= cap) return candidate;
  double bid = previous + (step > 0.0 ? cap : -cap);
  // pull back any rounding past the cap
  while (std::abs(bid - previous) > cap) bid = std::nextafter(bid, previous);
  return bid;
}

BidMessage ue_step(UeState& state, std::int64_t user_id, double price, std::int64_t n,
                   const DecayPolicy& policy, const BestResponseConfig& cfg) {
  if (!(price > 0.0) || !std::isfinite(price)) throw DomainError("ue_step: price must be > 0");
  const double power = best_response(state.params, price, cfg);
  const double previous = state.current_bid;
  const double bid = clamp_bid(previous, price * power, decay_value(policy, n));
  state.last_bid = previous;
  state.current_bid = bid;
  state.current_power = bid / price;
  return BidMessage{user_id, n + 1, bid};
}

UeAgent::UeAgent(std::int64_t user_id, UtilityParams params, double initial_bid,
                 DecayPolicy decay, std::int64_t decay_start, BestResponseConfig solver)
    : user_id_(user_id),
      state_{params, 0.0, initial_bid, 0.0},
      decay_(decay),
      decay_start_(decay_start),
      solver_(solver) {
  if (user_id < 0) throw DomainError("user id must be >= 0");
  if (!(initial_bid > 0.0) || !std::isfinite(initial_bid)) {
    throw DomainError("initial bid must be finite and > 0");
  }
  if (decay_start < 1) throw DomainError("decay_start must be >= 1");
  decay_.validate();
  solver_.validate();
}

BidMessage UeAgent::initial_bid() const { return BidMessage{user_id_, 1, state_.current_bid}; }

BidMessage UeAgent::on_price(const PriceMessage& price) {
  const DecayPolicy& active = price.n >= decay_start_ ? decay_ : DecayPolicy{};
  return ue_step(state_, user_id_, price.p, price.n, active, solver_);
}

double UeAgent::on_stop(const StopMessage& stop) const { return state_.current_bid / stop.p; }

BsState make_bs_state(std::size_t user_count, double total_power, double delta) {
  if (user_count == 0) throw DomainError("BS needs at least one user");
  if (!(total_power > 0.0) || !std::isfinite(total_power)) throw DomainError("P_T must be > 0");
  if (!(delta > 0.0)) throw DomainError("delta must be > 0");
  BsState state;
  state.total_power = total_power;
  state.delta = delta;
  state.previous_bids.assign(user_count, 0.0);
  return state;
}

BsDecision bs_step(BsState& state, std::span<const double> bids) {
  if (bids.size() != state.previous_bids.size()) {
    throw DomainError("bs_step: expected " + std::to_string(state.previous_bids.size()) +
                      " bids, got " + std::to_string(bids.size()));
  }
  ++state.round;
  double max_step = 0.0;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    max_step = std::max(max_step, std::abs(bids[i] - state.previous_bids[i]));
  }
  if (state.price > 0.0 && max_step < state.delta) {
    StopDecision stop{state.price, std::vector<double>(bids.size())};
    for (std::size_t i = 0; i < bids.size(); ++i) stop.powers[i] = bids[i] / state.price;
    return stop;
  }
  const double total = std::accumulate(bids.begin(), bids.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateBidsError("bs_step: all bids are zero");
  state.price = total / state.total_power;
  state.previous_bids.assign(bids.begin(), bids.end());
  return PriceDecision{state.price};
}

}  // namespace upfair
