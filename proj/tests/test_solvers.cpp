#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "upfair/errors.hpp"
#include "upfair/simulator.hpp"
#include "upfair/solvers.hpp"

using namespace upfair;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("best_response") {
  const UtilityParams u{4.0, 5.0};
  CHECK(best_response(u, 2.0) == doctest::Approx(5.0000000020611536097).epsilon(1e-9));
  CHECK(std::abs(slope(u, best_response(u, 2.0)) - 2.0) <= 1e-9);
  CHECK(slope(u, best_response(u, 0.7)) == doctest::Approx(0.7).epsilon(1e-8));
  CHECK(best_response(u, 1e13) == kMinPower);
  const UtilityParams far{1.0, 30.0};
  const double steep_price = best_response(far, 1000.0);
  CHECK(steep_price > 0.0);
  CHECK(steep_price < 30.0);
  CHECK(slope(far, steep_price) == doctest::Approx(1000.0).epsilon(1e-8));
  CHECK(steep_price < best_response(far, 0.5));
  CHECK(best_response(u, slope(u, 5.0)) == doctest::Approx(5.0).epsilon(1e-8));
  CHECK_THROWS_AS(best_response(u, 0.0), DomainError);
  CHECK_THROWS_AS(best_response(u, -1.0), DomainError);
  CHECK_THROWS_AS(best_response(u, std::nan("")), DomainError);
  BestResponseConfig tight;
  tight.max_bracket = 10.0;
  CHECK_THROWS_AS(best_response(u, 1e-30, tight), BracketOverflowError);
  BestResponseConfig bad;
  bad.power_tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("property: best response inverts the slope") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> steep(0.5, 8.0), center(1.0, 50.0), unit(0.0, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const UtilityParams u{steep(rng), center(rng)};
    const double top = slope(u, 0.01);
    const double price = 1e-3 * std::pow(top / 1e-3, unit(rng));
    const double p = best_response(u, price);
    INFO("a=" << u.a() << " b=" << u.b() << " price=" << price);
    CHECK(std::abs(slope(u, p) - price) <= 1e-8 * price);
  }
}

TEST_CASE("property: best response decreases with price") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> steep(0.5, 8.0), center(1.0, 50.0), lp(-6.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const UtilityParams u{steep(rng), center(rng)};
    double p1 = std::pow(10.0, lp(rng));
    double p2 = std::pow(10.0, lp(rng));
    if (p1 > p2) std::swap(p1, p2);
    CHECK(best_response(u, p1) >= best_response(u, p2));
  }
}

TEST_CASE("oracle examples") {
  const std::vector<UtilityParams> one{{4.0, 5.0}};
  const auto single = oracle_allocate(one, 45.0);
  REQUIRE(single.powers.size() == 1);
  CHECK(single.powers[0] == doctest::Approx(45.0).epsilon(1e-8));

  const std::vector<UtilityParams> twins{{1.0, 10.0}, {1.0, 10.0}};
  const auto pair = oracle_allocate(twins, 20.0);
  CHECK(pair.powers[0] == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(pair.powers[1] == doctest::Approx(10.0).epsilon(1e-6));

  const auto users = reference_users();
  const auto r = oracle_allocate(users, 100.0);
  const std::vector<double> expected{5.28, 10.26, 15.23, 20.17, 24.55, 24.52};
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(std::abs(r.powers[i] - expected[i]) <= 0.01 * expected[i]);
  CHECK(r.shadow_price == doctest::Approx(0.995863).epsilon(1e-5));

  CHECK_THROWS_AS(oracle_allocate(users, 0.0), DomainError);
  const std::vector<UtilityParams> none;
  CHECK_THROWS_AS(oracle_allocate(none, 10.0), DomainError);
}

TEST_CASE("property: oracle clears the budget and satisfies KKT") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> steep(0.5, 8.0), center(1.0, 50.0), budget(0.2, 2.0);
  std::uniform_int_distribution<int> count(1, 8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<UtilityParams> users;
    double centers = 0.0;
    for (int k = count(rng); k > 0; --k) {
      users.emplace_back(steep(rng), center(rng));
      centers += users.back().b();
    }
    const double total = budget(rng) * centers;
    const auto r = oracle_allocate(users, total);
    CHECK(std::abs(sum(r.powers) - total) <= 1e-6 * std::max(1.0, total));
    CHECK(r.kkt_residual <= 1e-6 * std::max(1.0, r.shadow_price));
    for (double p : r.powers) CHECK(p > 0.0);
  }
}

TEST_CASE("property: two-user grid search never beats the oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> steep(0.5, 8.0), center(1.0, 50.0), budget(0.3, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<UtilityParams> users{{steep(rng), center(rng)}, {steep(rng), center(rng)}};
    const double total = budget(rng) * (users[0].b() + users[1].b());
    const auto r = oracle_allocate(users, total);
    const double best = log_objective(users, r.powers);
    const double step = total / 1e5;
    double grid_best = -INFINITY;
    for (int k = 1; k < 100000; ++k) {
      const std::vector<double> split{k * step, total - k * step};
      grid_best = std::max(grid_best, log_objective(users, split));
    }
    INFO("a=" << users[0].a() << "," << users[1].a() << " b=" << users[0].b() << "," << users[1].b()
              << " P_T=" << total);
    CHECK(grid_best <= best + 1e-6);
  }
}

TEST_CASE("property: priority goes to the earlier inflection point") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> steep(0.5, 8.0), center(1.0, 50.0), gap(1.0, 20.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = steep(rng);
    const double b1 = center(rng);
    const double b2 = b1 + gap(rng);
    const std::vector<UtilityParams> users{{a, b1}, {a, b2}};
    const double total = 0.5 * (b1 + b2);
    const auto r = oracle_allocate(users, total);
    INFO("a=" << a << " b=" << b1 << "," << b2);
    // Lower-modulation users come first.
    CHECK(utility_value(users[0], r.powers[0]) >= utility_value(users[1], r.powers[1]) - 1e-12);
  }
}

TEST_CASE("log_objective") {
  const std::vector<UtilityParams> users{{4.0, 5.0}};
  const std::vector<double> p{5.0};
  CHECK(log_objective(users, p) == doctest::Approx(-0.69314718262109893398).epsilon(1e-13));
  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(log_objective(users, wrong), DomainError);
}
