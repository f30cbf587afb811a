#pragma once

#include <span>
#include <vector>

#include "upfair/utility.hpp"

namespace upfair {

struct BestResponseConfig {
  double power_tolerance = 1e-10;  // absolute bisection tolerance on P
  double max_bracket = 1e9;        // cap on the upper bracket

  // Throws DomainError unless power_tolerance > 0 and max_bracket > power_tolerance.
  void validate() const;
};

// Smallest power at which slopes are evaluated; P = 0 has ln U = -inf.
inline constexpr double kMinPower = 1e-12;

// argmax_P ln U(P) - p P, i.e. the unique P with slope(P) = p.
// Returns kMinPower when p >= slope(kMinPower).
double best_response(const UtilityParams& params, double price,
                     const BestResponseConfig& cfg = {});

struct OracleResult {
  std::vector<double> powers;
  double shadow_price = 0.0;
  double kkt_residual = 0.0;  // max_i |S_i(P_i) - p*|
};

// Global optimum of max sum_i ln U_i(P_i) s.t. sum_i P_i = total_power,
// found by bisecting the price until the best responses clear the budget.
OracleResult oracle_allocate(std::span<const UtilityParams> users, double total_power,
                             const BestResponseConfig& cfg = {});

// sum_i ln U_i(P_i).
double log_objective(std::span<const UtilityParams> users, std::span<const double> powers);

}  // namespace upfair
