#include "upfair/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "upfair/errors.hpp"

namespace upfair {

namespace {

constexpr int kMaxBisections = 400;
constexpr int kMaxPriceBisections = 200;
constexpr double kBudgetTolerance = 1e-8;

double total_demand(std::span<const UtilityParams> users, double price,
                    const BestResponseConfig& cfg, std::vector<double>& powers) {
  powers.resize(users.size());
  std::transform(users.begin(), users.end(), powers.begin(),
                 [&](const UtilityParams& u) { return best_response(u, price, cfg); });
  return std::accumulate(powers.begin(), powers.end(), 0.0);
}

}  // namespace

void BestResponseConfig::validate() const {
  if (!(power_tolerance > 0.0)) throw DomainError("power_tolerance must be > 0");
  if (!(max_bracket > power_tolerance)) {
    throw DomainError("max_bracket must exceed power_tolerance");
  }
}

double best_response(const UtilityParams& params, double price,
                     const BestResponseConfig& cfg) {
  if (!(price > 0.0) || !std::isfinite(price)) {
    throw DomainError("best_response: price must be finite and > 0, got " +
                      std::to_string(price));
  }
  cfg.validate();
  if (slope(params, kMinPower) <= price) return kMinPower;

  double lo = params.b();
  while (slope(params, lo) <= price) lo *= 0.5;
  double hi = params.b();
  while (slope(params, hi) >= price) {
    hi *= 2.0;
    if (hi > cfg.max_bracket) {
      throw BracketOverflowError("best_response: no root below max_bracket for price " +
                                 std::to_string(price));
    }
  }
  // slope(lo) > price > slope(hi). Tolerance is relative below P = 1 so that
  // tiny powers keep full precision.
  for (int i = 0; i < kMaxBisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (slope(params, mid) > price) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= cfg.power_tolerance * std::min(1.0, lo)) break;
  }
  return 0.5 * (lo + hi);
}

OracleResult oracle_allocate(std::span<const UtilityParams> users, double total_power,
                             const BestResponseConfig& cfg) {
  if (users.empty()) throw DomainError("oracle_allocate: no users");
  if (!(total_power > 0.0) || !std::isfinite(total_power)) {
    throw DomainError("oracle_allocate: total power must be finite and > 0");
  }
  const double tolerance = kBudgetTolerance * std::max(1.0, total_power);

  std::vector<double> powers;
  double hi = 0.0;
  for (const auto& u : users) hi = std::max(hi, slope(u, kMinPower));
  // Demand at the upper price is at most M * kMinPower; walk the lower price
  // down until demand exceeds the budget.
  double lo = hi;
  while (total_demand(users, lo, cfg, powers) <= total_power) {
    lo *= 1e-3;
    if (lo < 1e-300) throw BracketOverflowError("oracle_allocate: price underflow");
  }

  double price = lo;
  bool cleared = false;
  for (int i = 0; i < kMaxPriceBisections; ++i) {
    price = std::sqrt(lo) * std::sqrt(hi);
    if (price <= lo || price >= hi) break;
    const double demand = total_demand(users, price, cfg, powers);
    if (std::abs(demand - total_power) <= tolerance) {
      cleared = true;
      break;
    }
    if (demand > total_power) {
      lo = price;
    } else {
      hi = price;
    }
  }
  if (!cleared) {
    // Steep users can jump by more than the tolerance between adjacent
    // prices. Every slope already sits inside [lo, hi]; split the remainder
    // along the bracket.
    std::vector<double> at_lo, at_hi;
    const double demand_lo = total_demand(users, lo, cfg, at_lo);
    const double demand_hi = total_demand(users, hi, cfg, at_hi);
    const double t = demand_lo > demand_hi
                         ? std::clamp((total_power - demand_hi) / (demand_lo - demand_hi), 0.0, 1.0)
                         : 0.0;
    powers.resize(users.size());
    for (std::size_t i = 0; i < users.size(); ++i) powers[i] = at_hi[i] + t * (at_lo[i] - at_hi[i]);
    price = std::sqrt(lo) * std::sqrt(hi);
  }

  OracleResult result;
  result.shadow_price = price;
  result.kkt_residual = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    result.kkt_residual =
        std::max(result.kkt_residual, std::abs(slope(users[i], powers[i]) - price));
  }
  result.powers = std::move(powers);
  return result;
}

double log_objective(std::span<const UtilityParams> users, std::span<const double> powers) {
  if (users.size() != powers.size()) throw DomainError("log_objective: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) total += log_utility(users[i], powers[i]);
  return total;
}

}  // namespace upfair
