#include "upfair/utility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "upfair/errors.hpp"

namespace upfair {

namespace {

constexpr double kExponentClamp = 700.0;

double clamp_exponent(double x) noexcept {
  return std::clamp(x, -kExponentClamp, kExponentClamp);
}

void require_positive_power(double power, const char* op) {
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw DomainError(std::string(op) + ": power must be finite and > 0, got " +
                      std::to_string(power));
  }
}

// ln(1 + e^x) without overflow.
double softplus(double x) noexcept {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// 1 - e^{-aP} and e^{-aP}, both from the clamped exponent.
struct OriginTerm {
  double decay;       // e^{-aP}
  double complement;  // 1 - e^{-aP}
};

OriginTerm origin_term(double a, double power) noexcept {
  const double x = clamp_exponent(-a * power);
  return {std::exp(x), -std::expm1(x)};
}

}  // namespace

double guarded_exp(double x) noexcept { return std::exp(clamp_exponent(x)); }

UtilityParams::UtilityParams(double a, double b) : a_(a), b_(b) {
  if (!(a > 0.0 && a <= kMaxSteepness)) {
    throw DomainError("utility steepness a must lie in (0, 100], got " + std::to_string(a));
  }
  if (!(b > 0.0 && b <= kMaxCenter)) {
    throw DomainError("utility center b must lie in (0, 1e6], got " + std::to_string(b));
  }
  // With E = e^{-ab}: c = 1 + E and d = E / (1 + E). Both forms avoid e^{ab}.
  const double tail = guarded_exp(-a * b);
  c_ = 1.0 + tail;
  d_ = tail / (1.0 + tail);
}

void ChannelParams::validate() const {
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    throw DomainError("channel gain G must be > 0");
  }
  if (!(interference >= 0.0) || !std::isfinite(interference)) {
    throw DomainError("channel interference I must be >= 0");
  }
}

double utility_value(const UtilityParams& params, double power) {
  if (!(power >= 0.0)) {
    throw DomainError("utility_value: power must be >= 0, got " + std::to_string(power));
  }
  if (power == 0.0) return 0.0;
  // c (1/(1+e) - d) simplifies to (1 - e^{-aP}) / (1 + e^{-a(P-b)}).
  const auto origin = origin_term(params.a(), power);
  const double centered = guarded_exp(-params.a() * (power - params.b()));
  // U < 1 for every finite P even where the quotient rounds up to 1.
  return std::min(origin.complement / (1.0 + centered), std::nextafter(1.0, 0.0));
}

double log_utility(const UtilityParams& params, double power) {
  require_positive_power(power, "log_utility");
  const double a = params.a();
  const double x = clamp_exponent(-a * power);
  const double log_origin = std::log(-std::expm1(x));
  const double log_sigmoid = softplus(clamp_exponent(-a * (power - params.b())));
  return log_origin - log_sigmoid;
}

double slope(const UtilityParams& params, double power) {
  require_positive_power(power, "slope");
  const double a = params.a();
  const auto origin = origin_term(a, power);
  const double centered = guarded_exp(-a * (power - params.b()));
  // a d e / (1 - d (1 + e)) == a e^{-aP} / (1 - e^{-aP})
  const double near_origin = a * origin.decay / origin.complement;
  const double logistic = a * centered / (1.0 + centered);
  return near_origin + logistic;
}

double slope_derivative(const UtilityParams& params, double power) {
  require_positive_power(power, "slope_derivative");
  const double a = params.a();
  const auto origin = origin_term(a, power);
  const double centered = guarded_exp(-a * (power - params.b()));
  const double near_origin =
      -a * a * origin.decay / (origin.complement * origin.complement);
  const double sigma = 1.0 / (1.0 + centered);
  const double logistic = -a * a * sigma * (centered * sigma);
  return near_origin + logistic;
}

double inflection_power(const UtilityParams& params) noexcept { return params.b(); }

double sinr(const ChannelParams& channel, std::span<const double> allocation,
            std::size_t user) {
  channel.validate();
  if (allocation.empty()) throw DomainError("sinr: allocation is empty");
  if (user >= allocation.size()) throw DomainError("sinr: user index out of range");
  for (double p : allocation) {
    if (!(p >= 0.0)) throw DomainError("sinr: powers must be >= 0");
  }
  const double total = std::accumulate(allocation.begin(), allocation.end(), 0.0);
  const double own = channel.gain * allocation[user];
  const double denominator = channel.gain * total - own + channel.interference;
  if (!(denominator > 0.0)) {
    throw DegenerateChannelError("sinr: zero interference-plus-noise for user " +
                                 std::to_string(user));
  }
  return own / denominator;
}

}  // namespace upfair
