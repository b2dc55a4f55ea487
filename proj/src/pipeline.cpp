#include "platoon/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "platoon/csv.hpp"
#include "platoon/truth_gen.hpp"

namespace platoon::cli {

DataPaths data_paths(const std::string& data_dir, const RunConfig& config) {
  DataPaths p;
  for (int i = 0; i < config.train_logs; ++i)
    p.train.push_back(data_dir + "/train_" + std::to_string(i) + ".csv");
  for (int i = 0; i < config.test_logs; ++i)
    p.test.push_back(data_dir + "/test_" + std::to_string(i) + ".csv");
  return p;
}

namespace {

std::vector<hv::VelocitySample> make_log(const RunConfig& config,
                                         std::uint64_t profile_seed,
                                         std::uint64_t truth_seed) {
  const int steps =
      static_cast<int>(std::llround(config.log_duration_s / config.dt));
  const auto av = hv::synthetic_av_profile(profile_seed, steps, config.dt,
                                           config.profile_accel_limit);
  hv::TruthHvSpec spec = config.truth_spec();
  spec.seed = truth_seed;
  const auto vh = hv::simulate_truth_hv(spec, av);
  std::vector<hv::VelocitySample> out(av.size());
  for (std::size_t k = 0; k < av.size(); ++k) out[k] = {vh[k], av[k]};
  return out;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

void generate_data(const RunConfig& config, const std::string& data_dir) {
  const DataPaths paths = data_paths(data_dir, config);
  for (int i = 0; i < config.train_logs; ++i) {
    const auto log = make_log(config, mix(config.truth_seed, i),
                              mix(config.truth_seed, 100 + i));
    io::write_velocity_log(paths.train[i], log, config.dt);
  }
  for (int i = 0; i < config.test_logs; ++i) {
    const auto log = make_log(config, mix(config.truth_seed, 500 + i),
                              mix(config.truth_seed, 600 + i));
    io::write_velocity_log(paths.test[i], log, config.dt);
  }
}

gp::Dataset build_training_set(const RunConfig& config,
                               const std::string& data_dir) {
  const DataPaths paths = data_paths(data_dir, config);
  const hv::ArxCoefficients coeffs = config.arx();
  std::vector<gp::Dataset> parts;
  for (const auto& path : paths.train) {
    const auto log = io::read_velocity_log(path);
    parts.push_back(hv::subsample(hv::build_discrepancy_dataset(log, coeffs),
                                  config.subsample_stride));
  }
  return hv::evenly_downselect(hv::concat(parts), config.max_points);
}

std::vector<double> arx_rollout(const hv::ArxCoefficients& coeffs,
                                const std::vector<hv::VelocitySample>& log) {
  std::vector<double> out(log.size());
  for (int k = 0; k < 4; ++k) out[k] = log[k].v_hv;
  hv::VelocityHistory h;
  for (int i = 0; i < 4; ++i) {
    h.hv[i] = log[3 - i].v_hv;
    h.av[i] = log[3 - i].v_av;
  }
  for (std::size_t k = 4; k < log.size(); ++k) {
    out[k] = hv::arx_step(coeffs, h);
    h.push(out[k], log[k].v_av);
  }
  return out;
}

std::vector<double> arx_gp_rollout(const hv::ArxCoefficients& coeffs,
                                   const gp::GpModel& gp,
                                   const std::vector<hv::VelocitySample>& log) {
  std::vector<double> out(log.size());
  for (int k = 0; k < 4; ++k) out[k] = log[k].v_hv;
  hv::VelocityHistory h;
  for (int i = 0; i < 4; ++i) {
    h.hv[i] = log[3 - i].v_hv;
    h.av[i] = log[3 - i].v_av;
  }
  for (std::size_t k = 4; k < log.size(); ++k) {
    const auto step = hv::corrected_step(coeffs, gp, h);
    out[k] = step.mean;
    h.push(out[k], log[k].v_av);
  }
  return out;
}

gp::GpModel train_model(const RunConfig& config, const std::string& data_dir,
                        TrainReport* report) {
  const gp::Dataset train = build_training_set(config, data_dir);
  gp::FitOptions opt;
  opt.restarts = config.restarts;
  opt.seed = config.fit_seed;
  gp::FitOutcome outcome = gp::fit_detailed(train, opt);

  if (report) {
    report->restart_lml = outcome.restart_lml;
    report->best_restart = outcome.best_restart;
    report->training_points = static_cast<int>(train.size());

    const DataPaths paths = data_paths(data_dir, config);
    const hv::ArxCoefficients coeffs = config.arx();
    double a1 = 0, g1 = 0, ar = 0, gr = 0;
    for (const auto& path : paths.test) {
      const auto log = io::read_velocity_log(path);
      const gp::Dataset ds = hv::build_discrepancy_dataset(log, coeffs);
      // One-step: the dataset targets are the residuals of the nominal
      // prediction; the GP mean is subtracted from them.
      double acc_a = 0, acc_g = 0;
      for (Eigen::Index i = 0; i < ds.size(); ++i) {
        const double d = ds.targets[i];
        const auto p = outcome.model.predict(ds.inputs.row(i).transpose());
        acc_a += d * d;
        acc_g += (d - p.mean) * (d - p.mean);
      }
      a1 += std::sqrt(acc_a / static_cast<double>(ds.size()));
      g1 += std::sqrt(acc_g / static_cast<double>(ds.size()));

      std::vector<double> actual(log.size());
      for (std::size_t k = 0; k < log.size(); ++k) actual[k] = log[k].v_hv;
      const auto ra = arx_rollout(coeffs, log);
      const auto rg = arx_gp_rollout(coeffs, outcome.model, log);
      ar += hv::rmse(ra, actual);
      gr += hv::rmse(rg, actual);
    }
    const double n = static_cast<double>(paths.test.size());
    report->arx_onestep_rmse = a1 / n;
    report->gp_onestep_rmse = g1 / n;
    report->arx_rollout_rmse = ar / n;
    report->gp_rollout_rmse = gr / n;
  }
  return std::move(outcome.model);
}

std::string TrainReport::text() const {
  std::ostringstream os;
  os << "training_points " << training_points << '\n';
  os << "best_restart " << best_restart << '\n';
  os << "arx_onestep_rmse_mps " << io::format_double(arx_onestep_rmse) << '\n';
  os << "arx_gp_onestep_rmse_mps " << io::format_double(gp_onestep_rmse)
     << '\n';
  os << "arx_rollout_rmse_mps " << io::format_double(arx_rollout_rmse) << '\n';
  os << "arx_gp_rollout_rmse_mps " << io::format_double(gp_rollout_rmse)
     << '\n';
  return os.str();
}

std::string TrainReport::json() const {
  std::ostringstream os;
  os << "{\n  \"training_points\": " << training_points
     << ",\n  \"best_restart\": " << best_restart
     << ",\n  \"arx_onestep_rmse_mps\": " << io::format_double(arx_onestep_rmse)
     << ",\n  \"arx_gp_onestep_rmse_mps\": "
     << io::format_double(gp_onestep_rmse)
     << ",\n  \"arx_rollout_rmse_mps\": " << io::format_double(arx_rollout_rmse)
     << ",\n  \"arx_gp_rollout_rmse_mps\": "
     << io::format_double(gp_rollout_rmse) << "\n}\n";
  return os.str();
}

}  // namespace platoon::cli
