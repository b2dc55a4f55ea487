#include "platoon/chance.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace platoon {

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

namespace {

void check_probability(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("inverse_normal_cdf: p must be in (0, 1)");
}

double standard_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Acklam's rational approximation, |error| < 1.15e-9 before refinement.
double rational_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425, high = 1.0 - 0.02425;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > high) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double inverse_normal_cdf(double p) {
  check_probability(p);
  double z = rational_approx(p);
  // Two Halley refinements against erfc push the error near machine epsilon.
  for (int i = 0; i < 2; ++i) {
    const double e = normal_cdf(z) - p;
    const double u = e / standard_normal_pdf(z);
    z -= u / (1.0 + 0.5 * z * u);
  }
  return z;
}

double inverse_normal_cdf_bisect(double p) {
  check_probability(p);
  double lo = -40.0, hi = 40.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

DistancePolicy::DistancePolicy(double delta_m, double p_def_prob)
    : delta(delta_m), p_def(p_def_prob), quantile(0.0) {
  if (!(p_def > 0.5) || !(p_def < 1.0))
    throw std::invalid_argument("distance policy: p_def must be in (0.5, 1)");
  if (!(delta > 0.0))
    throw std::invalid_argument("distance policy: delta must be > 0");
  quantile = inverse_normal_cdf(p_def);
}

double tightened_min_distance(const DistancePolicy& policy,
                              double hv_position_variance) {
  if (hv_position_variance < 0.0)
    throw std::invalid_argument("tightened_min_distance: variance must be >= 0");
  return policy.delta + policy.quantile * std::sqrt(hv_position_variance);
}

Halfspace halfspace_form(const DistancePolicy& policy, double variance) {
  if (variance < 0.0)
    throw std::invalid_argument("halfspace_form: variance must be >= 0");
  Halfspace hs;
  hs.h = Eigen::Vector2d(-1.0, 1.0);
  // h' Sigma h with Sigma = diag(0, variance)
  const double hsh = variance;
  hs.b = -policy.delta - policy.quantile * std::sqrt(hsh);
  return hs;
}

}  // namespace platoon
