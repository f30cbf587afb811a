#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace upfair {

// Wire messages of the bid/price protocol. One line of JSON each:
//   {"t":"hello","id":0}
//   {"t":"bid","id":0,"n":3,"w":12.5}
//   {"t":"price","n":3,"p":1.25}
//   {"t":"stop","n":9,"p":1}
// Reals are written with 17 significant digits, so decode(encode(m)) == m.

struct HelloMessage {
  std::int64_t user_id = 0;
  friend bool operator==(const HelloMessage&, const HelloMessage&) = default;
};

struct BidMessage {
  std::int64_t user_id = 0;
  std::int64_t n = 0;
  double w = 0.0;
  friend bool operator==(const BidMessage&, const BidMessage&) = default;
};

struct PriceMessage {
  std::int64_t n = 0;
  double p = 0.0;
  friend bool operator==(const PriceMessage&, const PriceMessage&) = default;
};

// p is the price the final powers are read against: P_i = w_i / p.
struct StopMessage {
  std::int64_t n = 0;
  double p = 0.0;
  friend bool operator==(const StopMessage&, const StopMessage&) = default;
};

using Message = std::variant<HelloMessage, BidMessage, PriceMessage, StopMessage>;

// Throws ParseError for messages that violate their invariants
// (non-finite or negative bids, non-positive prices, negative ids).
std::string encode(const Message& message);

// Accepts a line with or without the trailing LF. Throws ParseError.
Message decode(std::string_view line);

}  // namespace upfair
