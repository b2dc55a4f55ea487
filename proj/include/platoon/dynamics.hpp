#ifndef PLATOON_DYNAMICS_HPP_
#define PLATOON_DYNAMICS_HPP_

#include <stdexcept>
#include <vector>

#include "platoon/hv_model.hpp"

namespace platoon {

struct VehicleState {
  double position = 0.0;  // m
  double velocity = 0.0;  // m/s
};

// Forward-Euler kinematics; the position update uses the pre-update velocity.
inline VehicleState av_step(const VehicleState& s, double accel, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("av_step: dt must be > 0");
  return {s.position + dt * s.velocity, s.velocity + dt * accel};
}

inline double propagate_hv_mean(double mean, double hv_velocity, double gp_mean,
                                double dt) {
  return mean + dt * hv_velocity + dt * gp_mean;
}

inline double propagate_hv_variance(double variance, double gp_variance,
                                    double dt) {
  return variance + dt * dt * gp_variance;
}

struct PlatoonState {
  std::vector<VehicleState> avs;  // index 0 = leader
  double hv_position_mean = 0.0;
  double hv_position_variance = 0.0;
  double hv_velocity = 0.0;
  hv::VelocityHistory history;  // lags k-1..k-4 (current values excluded)
};

}  // namespace platoon

#endif  // PLATOON_DYNAMICS_HPP_
