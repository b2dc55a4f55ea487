#ifndef PLATOON_CONFIG_HPP_
#define PLATOON_CONFIG_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "platoon/harness.hpp"

namespace platoon::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key-value configuration with [section] headers. Every key is checked
// against the schema; unknown keys are rejected. Defaults follow the
// published experiment setup.
struct RunConfig {
  int config_version = 1;

  // [scenario]
  std::string scenario_name = "velocity_tracking";
  double duration_s = 30.0;
  int n_av = 2;
  double initial_gap_m = 20.0;
  std::string reference_mps = "0:20";  // "start:value;start:value"
  std::uint64_t scenario_seed = 1;

  // [mpc]
  int horizon = 10;
  double dt = 0.1;
  double q1 = 5.0, q2 = 5.0, r = 10.0;
  double v_min = -35.0, v_max = 35.0;
  double a_min = -5.0, a_max = 5.0;
  double delta_m = 20.0;
  double p_def = 0.95;
  int sqp_max_iterations = 10;
  double sqp_tolerance = 1e-4;
  double slack_penalty = 1e6;
  double qp_eps = 1e-8;
  int qp_max_iterations = 20000;

  // [arx]
  double c1 = -3.0227, c2 = 3.3543, c3 = -1.6329, c4 = 0.3014;
  double b1 = 0.0063, b2 = -0.0303, b3 = 0.0495, b4 = -0.0254;
  double sample_time = 0.1;

  // [truth]
  int reaction_delay_steps = 6;
  double reaction_gain = 0.015;
  double reaction_width = 5.0;
  double ripple_amplitude = 0.12;
  double ripple_wavelength = 4.5;
  double accel_increment_limit = 0.45;
  double brake_increment_limit = 0.30;
  double noise_std = 0.002;
  std::uint64_t truth_seed = 7;
  double closed_loop_noise_std = 0.0;
  std::string plant_model = "generator";  // generator | arx_gp

  // [data]
  int train_logs = 6;
  int test_logs = 3;
  double log_duration_s = 60.0;
  double profile_accel_limit = 5.0;

  // [gp]
  int subsample_stride = 5;
  int max_points = 100;
  int restarts = 5;
  std::uint64_t fit_seed = 3;

  // [io]
  std::string output_dir = "out";

  // Derived views.
  sim::Scenario scenario() const;
  mpc::MpcConfig mpc_config(mpc::Variant variant) const;
  hv::ArxCoefficients arx() const;
  hv::TruthHvSpec truth_spec() const;
  sim::PlantModel plant() const;

  void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);
// Applies a "section.key=value" override.
void apply_override(RunConfig& config, const std::string& assignment);
// Full resolved configuration, schema order; re-parseable as a config file.
std::string manifest_text(const RunConfig& config);

std::vector<std::pair<double, double>> parse_reference_schedule(
    const std::string& text);

}  // namespace platoon::cli

#endif  // PLATOON_CONFIG_HPP_
