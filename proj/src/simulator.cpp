#include "upfair/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <string>

#include "upfair/errors.hpp"

namespace upfair {

void Scenario::validate() const {
  if (users.empty()) throw ConfigError("users", "at least one user is required");
  if (!(total_power > 0.0) || !std::isfinite(total_power)) {
    throw ConfigError("P_T", "must be finite and > 0");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta", "must be finite and > 0");
  try {
    decay.validate();
  } catch (const DomainError& e) {
    throw ConfigError("decay", e.what());
  }
  if (decay_start < 1) throw ConfigError("decay_start", "must be >= 1");
  if (!initial_bids.empty()) {
    if (initial_bids.size() != users.size()) {
      throw ConfigError("initial_bids", "length must match users");
    }
    for (double w : initial_bids) {
      if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("initial_bids", "bids must be > 0");
    }
  }
  if (max_iterations < 1) throw ConfigError("max_iterations", "must be >= 1");
  try {
    solver.validate();
  } catch (const DomainError& e) {
    throw ConfigError("solver", e.what());
  }
}

double Scenario::initial_bid(std::size_t user) const {
  return initial_bids.empty() ? kDefaultInitialBid : initial_bids.at(user);
}

std::vector<UtilityParams> reference_users() {
  return {{4.0, 5.0}, {3.5, 10.0}, {3.0, 15.0}, {2.5, 20.0}, {1.5, 25.0}, {1.0, 30.0}};
}

std::vector<UeAgent> make_agents(const Scenario& scenario) {
  std::vector<UeAgent> agents;
  agents.reserve(scenario.users.size());
  for (std::size_t i = 0; i < scenario.users.size(); ++i) {
    agents.emplace_back(static_cast<std::int64_t>(i), scenario.users[i], scenario.initial_bid(i),
                        scenario.decay, scenario.decay_start, scenario.solver);
  }
  return agents;
}

AllocationResult run_protocol(const Scenario& scenario, BsTransport& transport) {
  scenario.validate();
  const std::size_t users = scenario.users.size();
  if (transport.user_count() != users) throw TransportError("transport user count mismatch");

  AllocationResult result;
  BsState bs = make_bs_state(users, scenario.total_power, scenario.delta);
  std::vector<double> previous = transport.gather_bids(1);
  bs_step(bs, previous);
  transport.publish(PriceMessage{1, bs.price});

  for (std::int64_t n = 2;; ++n) {
    std::vector<double> bids = transport.gather_bids(n);

    IterationTrace row;
    row.n = n - 1;
    row.price = bs.price;
    row.powers.resize(users);
    for (std::size_t i = 0; i < users; ++i) {
      row.powers[i] = bids[i] / row.price;
      row.max_bid_step = std::max(row.max_bid_step, std::abs(bids[i] - previous[i]));
    }
    row.bids = bids;
    result.trace.push_back(std::move(row));
    const IterationTrace& last = result.trace.back();

    const BsDecision decision = bs_step(bs, bids);
    const bool stopped = std::holds_alternative<StopDecision>(decision);
    if (stopped || last.n >= scenario.max_iterations) {
      result.status = stopped ? RunStatus::converged : RunStatus::max_iterations_reached;
      transport.publish(StopMessage{n, last.price});
      result.final_powers = last.powers;
      result.final_price = last.price;
      result.iterations = last.n;
      break;
    }
    transport.publish(PriceMessage{n, bs.price});
    previous = std::move(bids);
  }

  result.oracle = oracle_allocate(scenario.users, scenario.total_power, scenario.solver);
  for (std::size_t i = 0; i < users; ++i) {
    result.oracle_gap =
        std::max(result.oracle_gap, std::abs(result.final_powers[i] - result.oracle.powers[i]));
  }
  return result;
}

AllocationResult run(const Scenario& scenario) {
  scenario.validate();
  InProcessTransport transport(make_agents(scenario));
  return run_protocol(scenario, transport);
}

Regime classify_regime(const Scenario& scenario) {
  double inflection_sum = 0.0;
  for (const auto& u : scenario.users) inflection_sum += inflection_power(u);
  return inflection_sum > scenario.total_power ? Regime::fluctuation_risk : Regime::convergent;
}

bool detect_fluctuation(std::span<const IterationTrace> trace, std::size_t window) {
  if (window < 4 || trace.size() < window) return false;
  const auto recent = trace.last(window);
  auto sign = [](double x) { return (x > 0.0) - (x < 0.0); };

  std::size_t alternations = 0;
  for (std::size_t k = 2; k < recent.size(); ++k) {
    const int before = sign(recent[k - 1].price - recent[k - 2].price);
    const int after = sign(recent[k].price - recent[k - 1].price);
    if (before != 0 && after == -before) ++alternations;
  }
  const bool damped = recent.back().max_bid_step <= 0.5 * recent.front().max_bid_step;
  return alternations >= window - 2 && !damped;
}

double steady_price_bound(std::span<const UtilityParams> users) {
  if (users.empty()) throw DomainError("steady_price_bound: no users");
  const auto widest = std::max_element(users.begin(), users.end(),
                                       [](const auto& x, const auto& y) { return x.b() < y.b(); });
  const double a = widest->a();
  const double d = widest->d();
  return a * d / (1.0 - d) + a / 2.0;
}

double critical_price(const UtilityParams& params) {
  const double a = params.a();
  const double half = a * params.b() / 2.0;
  // e^{ab/2} d == e^{-ab/2} / (1 + e^{-ab}) and 1 - d (1 + e^{ab/2}) ==
  // (1 - e^{-ab/2}) / (1 + e^{-ab}); both avoid overflowing e^{ab/2}.
  const double tail = guarded_exp(-2.0 * half);
  const double scaled_d = guarded_exp(-half) / (1.0 + tail);
  const double denominator = -std::expm1(-half) / (1.0 + tail);
  if (std::abs(denominator) < 1e-12) {
    throw SingularityError("critical_price: 1 - d(1 + e^{ab/2}) vanishes");
  }
  const double logistic = a / (1.0 + guarded_exp(-half));
  return a * scaled_d / denominator + logistic;
}

Scenario sweep_defaults(std::vector<UtilityParams> users) {
  Scenario s;
  s.users = std::move(users);
  s.delta = 1e-3;
  s.decay = DecayPolicy::exponential(5.0, 10.0);
  s.decay_start = 20;
  return s;
}

std::vector<SweepRow> sweep(const Scenario& base, std::span<const double> total_powers) {
  for (double total : total_powers) {
    if (!(total > 0.0) || !std::isfinite(total)) throw ConfigError("P_T", "sweep values must be > 0");
  }
  std::vector<std::future<SweepRow>> pending;
  pending.reserve(total_powers.size());
  for (double total : total_powers) {
    Scenario scenario = base;
    scenario.total_power = total;
    scenario.validate();
    pending.push_back(std::async(std::launch::async, [scenario = std::move(scenario)] {
      const AllocationResult result = run(scenario);
      SweepRow row;
      row.total_power = scenario.total_power;
      row.status = result.status;
      row.iterations = result.iterations;
      row.price = result.final_price;
      row.powers = result.final_powers;
      row.power_sum = std::accumulate(row.powers.begin(), row.powers.end(), 0.0);
      row.bids = result.trace.back().bids;
      row.oracle_powers = result.oracle.powers;
      return row;
    }));
  }
  std::vector<SweepRow> rows;
  rows.reserve(pending.size());
  for (auto& f : pending) rows.push_back(f.get());
  return rows;
}

}  // namespace upfair
