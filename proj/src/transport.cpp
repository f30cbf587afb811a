#include "upfair/transport.hpp"

#include <string>

#include "upfair/errors.hpp"

namespace upfair {

void BsTransport::record_published(const Message& message) {
  if (const auto* price = std::get_if<PriceMessage>(&message)) {
    record({TransportEvent::Kind::price_published, price->n, -1});
  } else if (const auto* stop = std::get_if<StopMessage>(&message)) {
    record({TransportEvent::Kind::stop_published, stop->n, -1});
  } else {
    throw TransportError("BS may only publish price or stop messages");
  }
}

RoundCollector::RoundCollector(std::size_t user_count, std::int64_t n)
    : n_(n), bids_(user_count, 0.0), seen_(user_count, false) {}

void RoundCollector::accept(const BidMessage& bid) {
  if (bid.user_id < 0 || static_cast<std::size_t>(bid.user_id) >= bids_.size()) {
    throw TransportError("bid from unknown user " + std::to_string(bid.user_id));
  }
  const auto id = static_cast<std::size_t>(bid.user_id);
  if (bid.n == n_ && seen_[id]) {
    throw DuplicateBidError("duplicate bid from user " + std::to_string(bid.user_id) +
                            " for round " + std::to_string(n_));
  }
  if (bid.n != n_) {
    throw TransportError("bid for round " + std::to_string(bid.n) + " while collecting round " +
                         std::to_string(n_));
  }
  seen_[id] = true;
  bids_[id] = bid.w;
  ++received_;
}

std::vector<double> RoundCollector::take() {
  if (!complete()) throw TransportError("round " + std::to_string(n_) + " is incomplete");
  return std::move(bids_);
}

InProcessTransport::InProcessTransport(std::vector<UeAgent> agents) : agents_(std::move(agents)) {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i].user_id() != static_cast<std::int64_t>(i)) {
      throw TransportError("in-process agents must be ordered by user id");
    }
    inbox_.push_back(encode(agents_[i].initial_bid()));
  }
}

std::vector<double> InProcessTransport::gather_bids(std::int64_t n) {
  RoundCollector round(agents_.size(), n);
  while (!inbox_.empty()) {
    const auto message = decode(inbox_.front());
    inbox_.pop_front();
    const auto* bid = std::get_if<BidMessage>(&message);
    if (bid == nullptr) throw TransportError("BS inbox holds a non-bid message");
    round.accept(*bid);
    record({TransportEvent::Kind::bid_consumed, bid->n, bid->user_id});
  }
  if (!round.complete()) {
    throw TransportError("round " + std::to_string(n) + " is missing bids");
  }
  return round.take();
}

void InProcessTransport::publish(const Message& message) {
  record_published(message);
  const std::string line = encode(message);
  const Message received = decode(line);
  if (const auto* price = std::get_if<PriceMessage>(&received)) {
    for (auto& agent : agents_) inbox_.push_back(encode(agent.on_price(*price)));
    return;
  }
  const auto& stop = std::get<StopMessage>(received);
  final_powers_.clear();
  for (const auto& agent : agents_) final_powers_.push_back(agent.on_stop(stop));
}

}  // namespace upfair
