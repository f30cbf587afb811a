#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "upfair/agents.hpp"
#include "upfair/solvers.hpp"
#include "upfair/transport.hpp"
#include "upfair/utility.hpp"

namespace upfair {

struct Scenario {
  static constexpr double kDefaultDelta = 1e-3;
  static constexpr double kDefaultInitialBid = 10.0;
  static constexpr std::int64_t kDefaultMaxIterations = 10000;

  std::vector<UtilityParams> users;
  double total_power = 0.0;
  double delta = kDefaultDelta;
  DecayPolicy decay;
  std::int64_t decay_start = 1;
  std::vector<double> initial_bids;  // empty means kDefaultInitialBid for everyone
  std::int64_t max_iterations = kDefaultMaxIterations;
  BestResponseConfig solver;

  // Throws ConfigError naming the offending field.
  void validate() const;
  double initial_bid(std::size_t user) const;
};

// The six-user example used throughout: a = {4, 3.5, 3, 2.5, 1.5, 1},
// b = {5, 10, 15, 20, 25, 30}.
std::vector<UtilityParams> reference_users();

// Round n of a run: the price p(n), the bids the UEs answered it with (after
// clamping), the powers those bids buy at p(n), and max_i |w_i - w_i(prev)|.
struct IterationTrace {
  std::int64_t n = 0;
  double price = 0.0;
  std::vector<double> bids;
  std::vector<double> powers;
  double max_bid_step = 0.0;
};

enum class RunStatus { converged, max_iterations_reached };

struct AllocationResult {
  RunStatus status = RunStatus::max_iterations_reached;
  std::vector<double> final_powers;
  double final_price = 0.0;
  std::int64_t iterations = 0;
  std::vector<IterationTrace> trace;
  double oracle_gap = 0.0;  // max_i |P_i - P_i^oracle|
  OracleResult oracle;
};

std::vector<UeAgent> make_agents(const Scenario& scenario);

// Drives the BS over any backend until Stop or max_iterations. The UEs must
// already be attached to the transport.
AllocationResult run_protocol(const Scenario& scenario, BsTransport& transport);

// run_protocol over the in-process backend.
AllocationResult run(const Scenario& scenario);

enum class Regime { convergent, fluctuation_risk };

// fluctuation_risk iff the inflection powers sum past the budget.
Regime classify_regime(const Scenario& scenario);

inline constexpr std::size_t kDefaultFluctuationWindow = 20;

// Over the last `window` rounds: successive price differences alternate in
// sign every time, and max_bid_step has not fallen by half or more.
bool detect_fluctuation(std::span<const IterationTrace> trace,
                        std::size_t window = kDefaultFluctuationWindow);

// a d / (1 - d) + a / 2 for the user with the largest b (first on ties).
double steady_price_bound(std::span<const UtilityParams> users);

// Price at which the best response sits at b / 2:
//   a d e^{ab/2} / (1 - d (1 + e^{ab/2})) + a e^{ab/2} / (1 + e^{ab/2}).
// Throws SingularityError when the first denominator is within 1e-12 of 0.
double critical_price(const UtilityParams& params);

struct SweepRow {
  double total_power = 0.0;
  RunStatus status = RunStatus::max_iterations_reached;
  std::int64_t iterations = 0;
  double price = 0.0;
  double power_sum = 0.0;
  std::vector<double> powers;
  std::vector<double> bids;
  std::vector<double> oracle_powers;
};

// Sweep settings: delta 1e-3, dw(n) = 5 e^{-n/10} from iteration 20.
Scenario sweep_defaults(std::vector<UtilityParams> users);

// One damped run per budget, using `base` with total_power replaced. Points
// run concurrently; each row is deterministic.
std::vector<SweepRow> sweep(const Scenario& base, std::span<const double> total_powers);

}  // namespace upfair
