#include "platoon/truth_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace platoon::hv {

void TruthHvSpec::validate() const {
  base.validate();
  if (reaction_delay_steps < 0)
    throw std::invalid_argument("truth: reaction_delay_steps must be >= 0");
  if (reaction_gain < 0.0 || !(reaction_width > 0.0))
    throw std::invalid_argument(
        "truth: reaction_gain must be >= 0 and reaction_width > 0");
  if (ripple_amplitude < 0.0 || !(ripple_wavelength > 0.0))
    throw std::invalid_argument(
        "truth: ripple_amplitude must be >= 0 and ripple_wavelength > 0");
  if (reaction_gain / reaction_width > 4e-3)
    throw std::invalid_argument(
        "truth: reaction slope gain/width beyond the stability margin of the "
        "base recursion (4e-3)");
  if (!(accel_increment_limit > 0.0) || !(brake_increment_limit > 0.0))
    throw std::invalid_argument("truth: increment limits must be > 0");
  if (noise_std < 0.0)
    throw std::invalid_argument("truth: noise_std must be >= 0");
}

double TruthHvSpec::gap_reaction(double v_hv, double v_av) const {
  if (reaction_gain == 0.0) return 0.0;
  return reaction_gain * std::tanh((v_av - v_hv) / reaction_width);
}

double TruthHvSpec::speed_ripple(double v_av) const {
  if (ripple_amplitude == 0.0) return 0.0;
  return ripple_amplitude * std::tanh(0.5 * v_av) *
         std::sin(2.0 * std::numbers::pi * v_av / ripple_wavelength);
}

TruthHv::TruthHv(const TruthHvSpec& spec, double v_hv0, double v_av0)
    : spec_(spec),
      hist_(VelocityHistory::constant(v_hv0, v_av0)),
      delay_queue_(static_cast<std::size_t>(
                       std::max(spec.reaction_delay_steps, 0)),
                   v_av0),
      rng_(spec.seed) {
  spec_.validate();
}

double TruthHv::gauss() {
  // Box-Muller on explicit uniform bits; stable across standard libraries.
  const double u1 =
      (static_cast<double>(rng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  const double u2 =
      static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double TruthHv::step(double av_velocity_prev) {
  double av_lag1 = av_velocity_prev;
  if (spec_.reaction_delay_steps > 0) {
    av_lag1 = delay_queue_.front();
    delay_queue_.erase(delay_queue_.begin());
    delay_queue_.push_back(av_velocity_prev);
  }
  // Shift the (delayed) input lags in before evaluating; the own-velocity
  // lags stay one step behind until the new value is known.
  for (int i = 3; i > 0; --i) hist_.av[i] = hist_.av[i - 1];
  hist_.av[0] = av_lag1;

  const double prev = hist_.hv[0];
  const double demand =
      arx_step(spec_.base, hist_) + spec_.gap_reaction(prev, hist_.av[0]);
  const double inc = std::clamp(demand - prev, -spec_.brake_increment_limit,
                                spec_.accel_increment_limit);
  double z = prev + inc;
  if (spec_.noise_std > 0.0) z += spec_.noise_std * gauss();

  // The internal tracking chain carries z; the ripple rides on the output
  // only, keyed to the undelayed front-vehicle speed.
  for (int i = 3; i > 0; --i) hist_.hv[i] = hist_.hv[i - 1];
  hist_.hv[0] = z;
  return z + spec_.speed_ripple(av_velocity_prev);
}

std::vector<double> simulate_truth_hv(const TruthHvSpec& spec,
                                      std::span<const double> av_trace,
                                      double v0) {
  if (av_trace.empty())
    throw std::invalid_argument("simulate_truth_hv: empty trace");
  TruthHv hv(spec, v0, v0);
  std::vector<double> out(av_trace.size());
  for (std::size_t k = 0; k < av_trace.size(); ++k)
    out[k] = hv.step(k == 0 ? v0 : av_trace[k - 1]);
  return out;
}

std::vector<double> synthetic_av_profile(std::uint64_t seed, int steps,
                                         double dt, double accel_limit) {
  if (steps < 1) throw std::invalid_argument("profile: steps must be >= 1");
  if (!(dt > 0.0) || !(accel_limit > 0.0))
    throw std::invalid_argument("profile: dt and accel_limit must be > 0");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  };

  std::vector<double> v(static_cast<std::size_t>(steps));
  double cur = 0.0;
  double target = 0.0;
  double rate = accel_limit;
  int next_switch = static_cast<int>((2.0 + 2.0 * uniform()) / dt);
  for (int k = 0; k < steps; ++k) {
    if (k >= next_switch) {
      target = 25.0 * uniform();
      rate = accel_limit * (0.4 + 0.6 * uniform());
      next_switch = k + static_cast<int>((3.0 + 5.0 * uniform()) / dt);
    }
    cur += std::clamp(target - cur, -rate * dt, rate * dt);
    v[static_cast<std::size_t>(k)] = cur;
  }
  return v;
}

}  // namespace platoon::hv
