#include "upfair/messages.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include <fmt/format.h>

#include "upfair/errors.hpp"

namespace upfair {

namespace {

using nlohmann::json;

void check_bid(double w) {
  if (!std::isfinite(w) || w < 0.0) throw ParseError("bid w must be finite and >= 0");
}

void check_price(double p) {
  if (!std::isfinite(p) || !(p > 0.0)) throw ParseError("price p must be finite and > 0");
}

void check_id(std::int64_t id) {
  if (id < 0) throw ParseError("user id must be >= 0");
}

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(fmt::format("missing field \"{}\"", key));
  return *it;
}

std::int64_t integer_field(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number_integer()) throw ParseError(fmt::format("field \"{}\" must be an integer", key));
  return v.get<std::int64_t>();
}

double real_field(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number()) throw ParseError(fmt::format("field \"{}\" must be a number", key));
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(fmt::format("field \"{}\" is not finite", key));
  return x;
}

struct Encoder {
  std::string operator()(const HelloMessage& m) const {
    check_id(m.user_id);
    return fmt::format("{{\"t\":\"hello\",\"id\":{}}}\n", m.user_id);
  }
  std::string operator()(const BidMessage& m) const {
    check_id(m.user_id);
    check_bid(m.w);
    return fmt::format("{{\"t\":\"bid\",\"id\":{},\"n\":{},\"w\":{:.17g}}}\n", m.user_id, m.n, m.w);
  }
  std::string operator()(const PriceMessage& m) const {
    check_price(m.p);
    return fmt::format("{{\"t\":\"price\",\"n\":{},\"p\":{:.17g}}}\n", m.n, m.p);
  }
  std::string operator()(const StopMessage& m) const {
    check_price(m.p);
    return fmt::format("{{\"t\":\"stop\",\"n\":{},\"p\":{:.17g}}}\n", m.n, m.p);
  }
};

}  // namespace

std::string encode(const Message& message) { return std::visit(Encoder{}, message); }

Message decode(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed message: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("message must be a JSON object");
  const json& tag = field(doc, "t");
  if (!tag.is_string()) throw ParseError("field \"t\" must be a string");
  const auto type = tag.get<std::string>();

  if (type == "hello") {
    HelloMessage m{integer_field(doc, "id")};
    check_id(m.user_id);
    return m;
  }
  if (type == "bid") {
    BidMessage m{integer_field(doc, "id"), integer_field(doc, "n"), real_field(doc, "w")};
    check_id(m.user_id);
    check_bid(m.w);
    return m;
  }
  if (type == "price") {
    PriceMessage m{integer_field(doc, "n"), real_field(doc, "p")};
    check_price(m.p);
    return m;
  }
  if (type == "stop") {
    StopMessage m{integer_field(doc, "n"), real_field(doc, "p")};
    check_price(m.p);
    return m;
  }
  throw ParseError("unknown message type \"" + type + "\"");
}

}  // namespace upfair
