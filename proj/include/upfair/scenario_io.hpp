#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "upfair/simulator.hpp"

namespace upfair {

// Scenario file (JSON):
//   {"users": [{"a": 4, "b": 5}, ...], "P_T": 45, "delta": 1e-3,
//    "decay": {"kind": "exponential", "l1": 5, "l2": 10},
//    "decay_start": 1, "initial_bids": [...], "max_iterations": 10000}
// Omitted optional fields keep the values in `defaults`. Unknown keys and bad
// values raise ConfigError naming the field.
Scenario parse_scenario(std::string_view text, const Scenario& defaults, bool require_total_power = true);
Scenario load_scenario(const std::string& path, const Scenario& defaults, bool require_total_power = true);

// "start:end:step", inclusive of end. Throws ConfigError on an empty or
// inverted range.
std::vector<double> parse_range(std::string_view spec);
// "5,10,20"
std::vector<double> parse_list(std::string_view spec);

// Reals in CSV output use 12 significant digits.
std::string format_real(double x);

// n,price,max_bid_step,w_1..w_M,P_1..P_M
void write_trace_csv(std::ostream& out, std::span<const IterationTrace> trace);
// P_T,p,sum_P,P_1..P_M,w_1..w_M,oracle_P_1..oracle_P_M
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace upfair
