#pragma once

#include <cstddef>
#include <span>

namespace upfair {

// Normalized sigmoidal utility of allocated power:
//
//   U(P) = c * (1 / (1 + exp(-a (P - b))) - d),
//   c = (1 + e^{ab}) / e^{ab},  d = 1 / (1 + e^{ab}),
//
// so that U(0) = 0 and U(inf) = 1. c and d are always derived from (a, b).
class UtilityParams {
 public:
  static constexpr double kMaxSteepness = 100.0;
  static constexpr double kMaxCenter = 1e6;

  // Throws DomainError unless a in (0, 100] and b in (0, 1e6].
  UtilityParams(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }

  friend bool operator==(const UtilityParams&, const UtilityParams&) = default;

 private:
  double a_;
  double b_;
  double c_;
  double d_;
};

struct ChannelParams {
  double gain = 1.0;          // G: path loss, shadowing and fading
  double interference = 0.0;  // I: noise plus intercell interference

  // Throws DomainError unless gain > 0 and interference >= 0.
  void validate() const;
};

// exp(x) with |x| clamped to 700 so that tails stay finite and nonzero.
double guarded_exp(double x) noexcept;

double utility_value(const UtilityParams& params, double power);

// ln U(P), evaluated as ln(1 - e^{-aP}) - ln(1 + e^{-a(P-b)}) so it stays
// accurate for P << b where U itself underflows.
double log_utility(const UtilityParams& params, double power);

// S(P) = d/dP ln U(P). Positive and strictly decreasing.
double slope(const UtilityParams& params, double power);

// dS/dP, strictly negative.
double slope_derivative(const UtilityParams& params, double power);

// Power at which U changes curvature (b).
double inflection_power(const UtilityParams& params) noexcept;

// SINR of user i: G P_i / (G sum_m P_m - G P_i + I).
double sinr(const ChannelParams& channel, std::span<const double> allocation,
            std::size_t user);

}  // namespace upfair
