#ifndef PLATOON_HARNESS_HPP_
#define PLATOON_HARNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "platoon/mpc.hpp"
#include "platoon/truth_gen.hpp"

namespace platoon::sim {

struct Scenario {
  std::string name = "velocity_tracking";
  double duration_s = 30.0;
  // Piecewise-constant reference: (start time s, value m/s), ordered.
  std::vector<std::pair<double, double>> reference_schedule{{0.0, 20.0}};
  double initial_gap_m = 20.0;
  int n_av = 2;
  std::uint64_t seed = 0;

  void validate() const;
  double reference_at(double t) const;
};

// How the simulated human is advanced.
enum class PlantModel {
  generator,  // the synthetic truth driver itself (default)
  arx_gp      // nominal recursion plus fed-back GP mean correction
};

struct SimRow {
  double time = 0.0;
  double v_ref = 0.0;
  std::vector<double> av_position, av_velocity, av_accel;
  double hv_position = 0.0, hv_velocity = 0.0;
  double hv_belief_mean = 0.0, hv_belief_variance = 0.0;
  double tightened_bound = 0.0;
  std::vector<double> gaps;  // av1-av2, ..., last av - hv
  mpc::SolveStatus solver_status = mpc::SolveStatus::optimal;
  int solver_iterations = 0;
  double slack = 0.0;
};

struct SimLog {
  int n_av = 0;
  std::vector<SimRow> rows;
  bool truncated = false;
  std::string failure;
};

struct Metrics {
  double total_cost = 0.0;
  double min_av_av_gap = 0.0;
  double min_av_hv_gap = 0.0;
  double tracking_rmse = 0.0;
  int constraint_violations = 0;
};

struct Plant {
  PlantModel model = PlantModel::generator;
  hv::TruthHvSpec truth;
  const gp::GpModel* gp_truth = nullptr;  // required for arx_gp
};

SimLog run(const Scenario& scenario, const mpc::MpcConfig& config,
           const hv::ArxCoefficients& coeffs, const gp::GpModel* gp_controller,
           const Plant& plant);

Metrics compute_metrics(const SimLog& log, const mpc::MpcConfig& config,
                        const Scenario& scenario);

struct CompareResult {
  SimLog nominal_log, gp_log;
  Metrics nominal, gp;
};

// Runs both variants against an identical plant; the two closed loops execute
// concurrently.
CompareResult compare(const Scenario& scenario, const mpc::MpcConfig& config,
                      const hv::ArxCoefficients& coeffs,
                      const gp::GpModel& gp_model, const Plant& plant);

void write_sim_csv(const std::string& path, const SimLog& log);
SimLog read_sim_csv(const std::string& path);

std::string metrics_text(const Metrics& m);
std::string metrics_json(const Metrics& m);

}  // namespace platoon::sim

#endif  // PLATOON_HARNESS_HPP_
