#ifndef PLATOON_PIPELINE_HPP_
#define PLATOON_PIPELINE_HPP_

#include <string>
#include <vector>

#include "platoon/config.hpp"
#include "platoon/gp_fit.hpp"

namespace platoon::cli {

struct DataPaths {
  std::vector<std::string> train;
  std::vector<std::string> test;
};
DataPaths data_paths(const std::string& data_dir, const RunConfig& config);

// Writes the seeded synthetic driving logs (train + test splits).
void generate_data(const RunConfig& config, const std::string& data_dir);

struct TrainReport {
  // Averages over the test logs.
  double arx_onestep_rmse = 0.0;
  double gp_onestep_rmse = 0.0;
  double arx_rollout_rmse = 0.0;
  double gp_rollout_rmse = 0.0;
  std::vector<double> restart_lml;
  int best_restart = 0;
  int training_points = 0;
  std::string text() const;
  std::string json() const;
};

// Discrepancy dataset from the train logs: per-log stride subsampling, then
// an even cap at gp.max_points.
gp::Dataset build_training_set(const RunConfig& config,
                               const std::string& data_dir);

gp::GpModel train_model(const RunConfig& config, const std::string& data_dir,
                        TrainReport* report);

// Model rollouts over a measured log, seeded with the first four samples.
std::vector<double> arx_rollout(const hv::ArxCoefficients& coeffs,
                                const std::vector<hv::VelocitySample>& log);
std::vector<double> arx_gp_rollout(const hv::ArxCoefficients& coeffs,
                                   const gp::GpModel& gp,
                                   const std::vector<hv::VelocitySample>& log);

}  // namespace platoon::cli

#endif  // PLATOON_PIPELINE_HPP_
