#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "upfair/errors.hpp"
#include "upfair/utility.hpp"

using namespace upfair;

namespace {

// Five-point central difference.
template <class F>
double central_difference(F f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12.0 * h);
}

bool close_rel(double x, double y, double rel) {
  return std::abs(x - y) <= rel * std::max(std::abs(x), std::abs(y));
}

const UtilityParams kUser1{4.0, 5.0};

}  // namespace

TEST_CASE("derived constants") {
  const UtilityParams u{4.0, 5.0};
  CHECK(u.c() * (1.0 - u.d()) == doctest::Approx(1.0).epsilon(1e-12));
  const double at_inflection = u.c() * (0.5 - u.d());
  CHECK(at_inflection > 0.0);
  CHECK(at_inflection <= 0.5);

  CHECK_THROWS_AS(UtilityParams(0.0, 5.0), DomainError);
  CHECK_THROWS_AS(UtilityParams(101.0, 5.0), DomainError);
  CHECK_THROWS_AS(UtilityParams(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(UtilityParams(1.0, 2e6), DomainError);
}

TEST_CASE("utility_value") {
  CHECK(utility_value(kUser1, 0.0) == 0.0);
  CHECK(utility_value(kUser1, 1000.0) > 1.0 - 1e-9);
  CHECK(utility_value(kUser1, 1000.0) < 1.0);
  // (e^20 - 1) / (2 e^20), 50-digit evaluation
  CHECK(utility_value(kUser1, 5.0) == doctest::Approx(0.49999999896942318878).epsilon(1e-14));
  CHECK_THROWS_AS(utility_value(kUser1, -1e-3), DomainError);
}

TEST_CASE("log_utility") {
  CHECK(log_utility(kUser1, 5.0) == doctest::Approx(-0.69314718262109893398).epsilon(1e-14));
  CHECK(log_utility(kUser1, 0.1) == doctest::Approx(-20.709632934663807949).epsilon(1e-12));
  const UtilityParams u{1.0, 30.0};
  const double far = log_utility(u, 1000.0 * u.b());
  CHECK(far <= 0.0);
  CHECK(far > -1e-9);
  // Naive log(U) underflows here; the factored form stays finite.
  CHECK(std::isfinite(log_utility(UtilityParams{8.0, 50.0}, 1e-3)));
  CHECK_THROWS_AS(log_utility(kUser1, 0.0), DomainError);
}

TEST_CASE("slope") {
  CHECK(slope(kUser1, 5.0) == doctest::Approx(2.0000000082446145067).epsilon(1e-14));
  CHECK(slope(UtilityParams{1.0, 30.0}, 30.0) == doctest::Approx(0.50000000000009357623).epsilon(1e-14));
  for (double p : {2.0, 5.0, 8.0}) {
    const double fd = central_difference([](double x) { return log_utility(kUser1, x); }, p, 1e-6);
    CHECK(close_rel(slope(kUser1, p), fd, 1e-5));
  }
  CHECK(slope(kUser1, 1e-9) > 1e8);
  CHECK(slope(kUser1, 200.0) < 1e-100);
  CHECK_THROWS_AS(slope(kUser1, -1.0), DomainError);
}

TEST_CASE("slope_derivative") {
  const double fd = central_difference([](double x) { return slope(kUser1, x); }, 5.0, 1e-6);
  CHECK(close_rel(slope_derivative(kUser1, 5.0), fd, 1e-5));
  CHECK(slope_derivative(kUser1, 5.0) == doctest::Approx(-4.000000032978458095).epsilon(1e-12));
  for (double p : {1.0, 5.0, 20.0}) CHECK(slope_derivative(kUser1, p) < 0.0);
  CHECK(slope_derivative(UtilityParams{3.5, 10.0}, 10.0) ==
        doctest::Approx(-3.0625000000000077238).epsilon(1e-13));
  CHECK_THROWS_AS(slope_derivative(kUser1, 0.0), DomainError);
}

TEST_CASE("inflection_power") {
  CHECK(inflection_power(kUser1) == 5.0);
  CHECK(inflection_power(UtilityParams{1.0, 30.0}) == 30.0);
  const std::vector<UtilityParams> users{{4, 5}, {3.5, 10}, {3, 15}, {2.5, 20}, {1.5, 25}, {1, 30}};
  double total = 0.0;
  for (const auto& u : users) total += inflection_power(u);
  CHECK(total == 105.0);
}

TEST_CASE("sinr") {
  const std::vector<double> two{3.0, 2.0};
  CHECK(sinr(ChannelParams{1.0, 1.0}, two, 0) == doctest::Approx(1.0));
  const std::vector<double> equal{4.0, 4.0};
  CHECK(sinr(ChannelParams{2.0, 0.0}, equal, 1) == doctest::Approx(1.0));
  const std::vector<double> single{7.0};
  CHECK_THROWS_AS(sinr(ChannelParams{1.0, 0.0}, single, 0), DegenerateChannelError);
  CHECK_THROWS_AS(sinr(ChannelParams{0.0, 1.0}, two, 0), DomainError);
  CHECK_THROWS_AS(sinr(ChannelParams{1.0, 1.0}, two, 2), DomainError);
}

TEST_CASE("property: analytic derivatives match finite differences") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> steep(0.5, 8.0), center(1.0, 50.0), where(0.1, 3.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const UtilityParams u{steep(rng), center(rng)};
    const double p = where(rng) * u.b();
    const double h = std::min(1e-3 / u.a(), 0.25 * p);
    const double fd_slope = central_difference([&](double x) { return log_utility(u, x); }, p, h);
    const double fd_curv =
        central_difference([&](double x) { return slope(u, x); }, p, h);
    // Far in the tail the values drop below finite-difference resolution.
    if (std::abs(fd_slope) > 1e-6) {
      INFO("a=" << u.a() << " b=" << u.b() << " P=" << p);
      CHECK(close_rel(slope(u, p), fd_slope, 1e-5));
    }
    // S is O(a) before b, so tiny curvatures cancel out of the difference.
    // Past a P = 700 the exponentials are clamped.
    if (u.a() * (p + 2 * h) < 700.0 && std::abs(fd_curv) > 1e-6 * slope(u, p)) {
      INFO("a=" << u.a() << " b=" << u.b() << " P=" << p);
      CHECK(close_rel(slope_derivative(u, p), fd_curv, 1e-5));
    }
  }
}

TEST_CASE("property: slope derivative is negative on a log grid") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> steep(0.5, 8.0), center(1.0, 50.0);
  constexpr double kUsers = 6.0;
  for (int trial = 0; trial < 200; ++trial) {
    const UtilityParams u{steep(rng), center(rng)};
    const double top = 2.0 * u.b() * kUsers;
    const double bottom = 1e-6 * top;
    for (int k = 1; k <= 500; ++k) {
      const double p = bottom * std::pow(top / bottom, k / 500.0);
      REQUIRE(slope_derivative(u, p) < 0.0);
    }
  }
}

TEST_CASE("property: utility is increasing and bounded") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> steep(0.5, 8.0), center(1.0, 50.0), where(0.0, 4.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const UtilityParams u{steep(rng), center(rng)};
    double p1 = where(rng) * u.b();
    double p2 = where(rng) * u.b();
    if (p1 > p2) std::swap(p1, p2);
    const double u1 = utility_value(u, p1);
    const double u2 = utility_value(u, p2);
    CHECK(u1 >= 0.0);
    CHECK(u2 < 1.0);
    // Strictness is only observable while the values are resolvable.
    if (p2 - p1 > 1e-9 * u.b() && u2 < 1.0 - 1e-12) CHECK(u1 < u2);
  }
  CHECK(utility_value(UtilityParams{8.0, 1.0}, 1e9) < 1.0);
}

TEST_CASE("slope curvature: one concave-to-convex crossing near b") {
  // S is convex near the origin, concave before b and convex after it. The
  // concave-to-convex change happens once on (0, 3b), within b +- 2/a.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> steep(0.5, 8.0), center(1.0, 50.0);
  int checked = 0;
  while (checked < 100) {
    const UtilityParams u{steep(rng), center(rng)};
    if (u.a() * u.b() < 10.0) continue;
    ++checked;
    const int samples = 3000;
    const double step = 3.0 * u.b() / samples;
    std::vector<int> signs;
    std::vector<double> at;
    for (int k = 1; k < samples; ++k) {
      const double p = k * step;
      // second difference of S through its analytic derivative
      const double h = 1e-4 * u.b();
      const double curvature = slope_derivative(u, p + h) - slope_derivative(u, std::max(p - h, 1e-9));
      signs.push_back((curvature > 0.0) - (curvature < 0.0));
      at.push_back(p);
    }
    int up_crossings = 0;
    double crossing = 0.0;
    int last = 0;
    for (std::size_t k = 0; k < signs.size(); ++k) {
      if (signs[k] == 0) continue;
      if (last < 0 && signs[k] > 0) {
        ++up_crossings;
        crossing = at[k];
      }
      last = signs[k];
    }
    INFO("a=" << u.a() << " b=" << u.b());
    CHECK(signs.front() > 0);
    CHECK(up_crossings == 1);
    CHECK(std::abs(crossing - u.b()) <= 2.0 / u.a());
  }
}
