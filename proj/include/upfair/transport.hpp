#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "upfair/agents.hpp"
#include "upfair/messages.hpp"

namespace upfair {

// Sequence audit entry: a bid consumed by the BS or a message published by it.
struct TransportEvent {
  enum class Kind { bid_consumed, price_published, stop_published };
  Kind kind;
  std::int64_t n;
  std::int64_t user_id;  // -1 for published messages
};

// BS side of the protocol. A round is a barrier: gather_bids(n) returns only
// once exactly one round-n bid per user has arrived, and the BS publishes the
// round-n price only after that.
class BsTransport {
 public:
  virtual ~BsTransport() = default;

  virtual std::size_t user_count() const = 0;

  // Bids for round n indexed by user id. Throws DuplicateBidError when two
  // bids share (user_id, n), TimeoutError when the backend has a deadline.
  virtual std::vector<double> gather_bids(std::int64_t n) = 0;

  // PriceMessage or StopMessage, delivered to every UE.
  virtual void publish(const Message& message) = 0;

  const std::vector<TransportEvent>& events() const noexcept { return events_; }

 protected:
  void record(TransportEvent event) { events_.push_back(event); }
  void record_published(const Message& message);

 private:
  std::vector<TransportEvent> events_;
};

// Collects decoded bids for one round and enforces the barrier rules.
class RoundCollector {
 public:
  RoundCollector(std::size_t user_count, std::int64_t n);

  // Throws DuplicateBidError, or TransportError for a wrong round / id.
  void accept(const BidMessage& bid);
  bool complete() const noexcept { return received_ == bids_.size(); }
  std::vector<double> take();

 private:
  std::int64_t n_;
  std::vector<double> bids_;
  std::vector<bool> seen_;
  std::size_t received_ = 0;
};

// Deterministic single-process backend. UEs are stepped in user-id order and
// every message crosses the wire codec, so traces match the socket backend.
class InProcessTransport final : public BsTransport {
 public:
  explicit InProcessTransport(std::vector<UeAgent> agents);

  std::size_t user_count() const override { return agents_.size(); }
  std::vector<double> gather_bids(std::int64_t n) override;
  void publish(const Message& message) override;

  // Queues a raw wire line as if a UE had sent it.
  void inject(std::string line) { inbox_.push_back(std::move(line)); }

  const std::vector<UeAgent>& agents() const noexcept { return agents_; }
  // Powers computed by the UEs on Stop (empty before).
  const std::vector<double>& final_powers() const noexcept { return final_powers_; }

 private:
  std::vector<UeAgent> agents_;
  std::deque<std::string> inbox_;
  std::vector<double> final_powers_;
};

}  // namespace upfair
