#include "upfair/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "upfair/errors.hpp"

namespace upfair {

namespace {

using nlohmann::json;

double number(const json& value, const std::string& field) {
  if (!value.is_number()) throw ConfigError(field, "must be a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

std::int64_t integer(const json& value, const std::string& field) {
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_number_float()) {
    const double x = value.get<double>();
    if (std::isfinite(x) && x == std::floor(x)) return static_cast<std::int64_t>(x);
  }
  throw ConfigError(field, "must be an integer");
}

void reject_unknown(const json& object, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(where + key, "unknown field");
  }
}

std::vector<UtilityParams> parse_users(const json& value) {
  if (!value.is_array() || value.empty()) throw ConfigError("users", "must be a non-empty array");
  std::vector<UtilityParams> users;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::string where = "users[" + std::to_string(i) + "]";
    const json& entry = value[i];
    if (!entry.is_object()) throw ConfigError(where, "must be an object with a and b");
    reject_unknown(entry, {"a", "b"}, where + ".");
    if (!entry.contains("a")) throw ConfigError(where + ".a", "missing");
    if (!entry.contains("b")) throw ConfigError(where + ".b", "missing");
    const double a = number(entry["a"], where + ".a");
    const double b = number(entry["b"], where + ".b");
    try {
      users.emplace_back(a, b);
    } catch (const DomainError& e) {
      throw ConfigError(where, e.what());
    }
  }
  return users;
}

DecayPolicy parse_decay(const json& value) {
  if (!value.is_object()) throw ConfigError("decay", "must be an object");
  reject_unknown(value, {"kind", "l1", "l2", "l3"}, "decay.");
  if (!value.contains("kind") || !value["kind"].is_string()) {
    throw ConfigError("decay.kind", "must be one of none, exponential, rational");
  }
  const auto kind = value["kind"].get<std::string>();
  auto param = [&](const char* key) {
    const std::string field = std::string("decay.") + key;
    if (!value.contains(key)) throw ConfigError(field, "missing");
    const double x = number(value[key], field);
    if (!(x > 0.0)) throw ConfigError(field, "must be > 0");
    return x;
  };
  if (kind == "none") return DecayPolicy::none();
  if (kind == "exponential") return DecayPolicy::exponential(param("l1"), param("l2"));
  if (kind == "rational") return DecayPolicy::rational(param("l3"));
  throw ConfigError("decay.kind", "must be one of none, exponential, rational");
}

}  // namespace

Scenario parse_scenario(std::string_view text, const Scenario& defaults, bool require_total_power) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "must be a JSON object");
  reject_unknown(doc, {"users", "P_T", "delta", "decay", "decay_start", "initial_bids", "max_iterations"},
                 "");

  Scenario s = defaults;
  if (!doc.contains("users")) throw ConfigError("users", "missing");
  s.users = parse_users(doc["users"]);
  if (doc.contains("P_T")) {
    s.total_power = number(doc["P_T"], "P_T");
  } else if (require_total_power) {
    throw ConfigError("P_T", "missing");
  }
  if (doc.contains("delta")) s.delta = number(doc["delta"], "delta");
  if (doc.contains("decay")) s.decay = parse_decay(doc["decay"]);
  if (doc.contains("decay_start")) s.decay_start = integer(doc["decay_start"], "decay_start");
  if (doc.contains("max_iterations")) s.max_iterations = integer(doc["max_iterations"], "max_iterations");
  s.initial_bids.clear();
  if (doc.contains("initial_bids")) {
    const json& bids = doc["initial_bids"];
    if (!bids.is_array()) throw ConfigError("initial_bids", "must be an array");
    for (std::size_t i = 0; i < bids.size(); ++i) {
      s.initial_bids.push_back(number(bids[i], "initial_bids[" + std::to_string(i) + "]"));
    }
  }

  if (require_total_power) {
    s.validate();
  } else {
    Scenario probe = s;
    probe.total_power = 1.0;
    probe.validate();
  }
  return s;
}

Scenario load_scenario(const std::string& path, const Scenario& defaults, bool require_total_power) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<config>", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), defaults, require_total_power);
}

namespace {

double parse_real(std::string_view token, const char* field) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ConfigError(field, "not a number: '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> parse_range(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw ConfigError("range", "expected start:end:step");
  const double start = parse_real(parts[0], "range");
  const double end = parse_real(parts[1], "range");
  const double step = parse_real(parts[2], "range");
  if (!(step > 0.0)) throw ConfigError("range", "step must be > 0");
  if (start > end) throw ConfigError("range", "start must not exceed end");
  std::vector<double> values;
  for (std::int64_t k = 0;; ++k) {
    const double x = start + static_cast<double>(k) * step;
    if (x > end + 1e-9 * step) break;
    values.push_back(x);
  }
  return values;
}

std::vector<double> parse_list(std::string_view spec) {
  std::vector<double> values;
  for (auto token : split(spec, ',')) values.push_back(parse_real(token, "values"));
  if (values.empty()) throw ConfigError("values", "empty list");
  return values;
}

std::string format_real(double x) { return fmt::format("{:.12g}", x); }

void write_trace_csv(std::ostream& out, std::span<const IterationTrace> trace) {
  const std::size_t users = trace.empty() ? 0 : trace.front().bids.size();
  out << "n,price,max_bid_step";
  for (std::size_t i = 1; i <= users; ++i) out << ",w_" << i;
  for (std::size_t i = 1; i <= users; ++i) out << ",P_" << i;
  out << '\n';
  for (const auto& row : trace) {
    out << row.n << ',' << format_real(row.price) << ',' << format_real(row.max_bid_step);
    for (double w : row.bids) out << ',' << format_real(w);
    for (double p : row.powers) out << ',' << format_real(p);
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  const std::size_t users = rows.empty() ? 0 : rows.front().powers.size();
  out << "P_T,p,sum_P";
  for (std::size_t i = 1; i <= users; ++i) out << ",P_" << i;
  for (std::size_t i = 1; i <= users; ++i) out << ",w_" << i;
  for (std::size_t i = 1; i <= users; ++i) out << ",oracle_P_" << i;
  out << '\n';
  for (const auto& row : rows) {
    out << format_real(row.total_power) << ',' << format_real(row.price) << ','
        << format_real(row.power_sum);
    for (double p : row.powers) out << ',' << format_real(p);
    for (double w : row.bids) out << ',' << format_real(w);
    for (double p : row.oracle_powers) out << ',' << format_real(p);
    out << '\n';
  }
}

}  // namespace upfair
