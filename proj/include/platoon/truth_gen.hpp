#ifndef PLATOON_TRUTH_GEN_HPP_
#define PLATOON_TRUTH_GEN_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "platoon/hv_model.hpp"

namespace platoon::hv {

// Synthetic ground-truth driver: the nominal recursion perturbed by an
// extra reaction dead time on the input path, a velocity-gap reaction
// deficit carried through a second recursion channel, asymmetric per-step
// increment saturation, and seeded Gaussian noise. With delay 0, zero
// reaction gain, infinite limits and zero noise it reduces to the pure
// nominal rollout.
//
// The reaction deficit is the one-step deviation between this driver and
// the nominal recursion evaluated on the measured lags: the generated
// velocity satisfies v[k] = arx(measured lags) + g(v[k-1], av[k-1]) + noise
// with g = -gain * tanh^3((v_av - v_hv) / width). The deficit vanishes with
// a flat slope at equal speeds, so every constant-speed equilibrium of the
// nominal model survives (the recursion has 1 + sum(c) ~ 1e-4 and tolerates
// almost no sustained additive input or dwell-state feedback).
struct TruthHvSpec {
  ArxCoefficients base;
  int reaction_delay_steps = 6;
  double reaction_gain = 0.12;          // m/s, bound of the reaction deficit
  double reaction_width = 4.0;          // m/s, gap scale of the deficit
  double accel_increment_limit = 0.45;  // m/s per step, >= 0
  double brake_increment_limit = 0.30;  // m/s per step, >= 0
  double noise_std = 0.002;             // m/s
  std::uint64_t seed = 0;

  void validate() const;
  // The reaction deficit at lagged velocities (v_hv, v_av); negative when
  // the front vehicle pulls away (sluggish response), positive when it
  // drops back (late braking).
  double reaction_deficit(double v_hv, double v_av) const;
};

// Stateful stepper usable inside a closed-loop simulation.
class TruthHv {
 public:
  TruthHv(const TruthHvSpec& spec, double v_hv0, double v_av0);

  // Advances one step given the front vehicle's velocity at the previous
  // step; returns the new HV velocity.
  double step(double av_velocity_prev);

  const VelocityHistory& history() const { return hist_; }

 private:
  TruthHvSpec spec_;
  VelocityHistory hist_;               // lags of the nominal tracking chain
  std::array<double, 4> deficit_lags_{};  // reaction channel, newest first
  double measured_prev_ = 0.0;         // last emitted velocity
  std::vector<double> delay_queue_;    // delayed AV velocities, oldest first
  std::mt19937_64 rng_;
  double gauss();
};

std::vector<double> simulate_truth_hv(const TruthHvSpec& spec,
                                      std::span<const double> av_trace,
                                      double v0 = 0.0);

// Piecewise-constant speed targets joined by accel-limited ramps; used to
// drive the synthetic data-collection runs.
std::vector<double> synthetic_av_profile(std::uint64_t seed, int steps,
                                         double dt, double accel_limit = 5.0);

}  // namespace platoon::hv

#endif  // PLATOON_TRUTH_GEN_HPP_
