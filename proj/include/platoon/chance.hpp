#ifndef PLATOON_CHANCE_HPP_
#define PLATOON_CHANCE_HPP_

#include <Eigen/Core>

namespace platoon {

// Standard normal quantile. Rational approximation refined with Halley steps
// on erfc; absolute error well below 1e-9.
double inverse_normal_cdf(double p);
// Reference implementation: plain bisection on erfc to an interval of 1e-12.
double inverse_normal_cdf_bisect(double p);

double normal_cdf(double z);

// Minimum-distance requirement between the trailing AV and the HV, held with
// probability p_def under a Gaussian position belief.
struct DistancePolicy {
  double delta;     // fixed gap, m
  double p_def;     // in (0.5, 1)
  double quantile;  // cached inverse CDF at p_def

  DistancePolicy(double delta_m, double p_def_prob);
};

// delta + quantile * sqrt(variance)
double tightened_min_distance(const DistancePolicy& policy,
                              double hv_position_variance);

struct Halfspace {
  Eigen::Vector2d h;  // acts on (p_av, p_hv)
  double b;
};

// Equivalent half-space form h^T x <= b of the tightened constraint.
Halfspace halfspace_form(const DistancePolicy& policy, double variance);

}  // namespace platoon

#endif  // PLATOON_CHANCE_HPP_
