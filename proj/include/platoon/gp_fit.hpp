#ifndef PLATOON_GP_FIT_HPP_
#define PLATOON_GP_FIT_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "platoon/gp_model.hpp"

namespace platoon::gp {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitOptions {
  int restarts = 5;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  double grad_tolerance = 1e-7;
  // When set, the noise variance is held fixed instead of optimized.
  std::optional<double> fixed_noise_variance;
  // Initial draws are log-uniform over [low, high] per hyperparameter.
  double init_low = 1e-2;
  double init_high = 1e2;
  bool parallel_restarts = true;
};

struct FitOutcome {
  GpModel model;
  int best_restart = 0;
  std::vector<double> restart_lml;  // one entry per restart
};

// Maximizes the log marginal likelihood by gradient ascent on log-parameters
// with Armijo backtracking, multi-start. Deterministic given the seed: the
// restart with the highest likelihood wins, ties broken by restart index.
FitOutcome fit_detailed(const Dataset& data, const FitOptions& options);
GpModel fit(const Dataset& data, const FitOptions& options = {});

}  // namespace platoon::gp

#endif  // PLATOON_GP_FIT_HPP_
