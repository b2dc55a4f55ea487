#ifndef PLATOON_HV_MODEL_HPP_
#define PLATOON_HV_MODEL_HPP_

#include <array>
#include <span>
#include <vector>

#include "platoon/gp_model.hpp"

namespace platoon::hv {

// Discrete human-driver velocity model
//   v[k] = -sum_i c_i v[k-i] + sum_i b_i u[k-i]
// where u is the velocity of the autonomous vehicle directly ahead.
struct ArxCoefficients {
  std::array<double, 4> c{};
  std::array<double, 4> b{};
  double sample_time = 0.1;  // seconds

  // Identified parameters of the published driver model.
  static ArxCoefficients identified();

  double dc_gain() const;
  void validate() const;
};

// Lagged velocities, newest first: hv[0] = v[k-1], ..., hv[3] = v[k-4].
struct VelocityHistory {
  std::array<double, 4> hv{};
  std::array<double, 4> av{};

  static VelocityHistory constant(double v_hv, double v_av) {
    VelocityHistory h;
    h.hv.fill(v_hv);
    h.av.fill(v_av);
    return h;
  }
  void push(double v_hv, double v_av) {
    for (int i = 3; i > 0; --i) {
      hv[i] = hv[i - 1];
      av[i] = av[i - 1];
    }
    hv[0] = v_hv;
    av[0] = v_av;
  }
};

// One step of the nominal recursion: the predicted velocity at step k given
// lags k-1..k-4.
double arx_step(const ArxCoefficients& coeffs, const VelocityHistory& hist);

struct CorrectedStep {
  double mean;
  double variance;
};

// Nominal step plus the GP discrepancy correction queried at
// (v_hv[k-1], v_av[k-1]). The GP must have input dimension 2.
CorrectedStep corrected_step(const ArxCoefficients& coeffs,
                             const gp::GpModel& gp, const VelocityHistory& hist);

// One measured sample of the vehicle pair.
struct VelocitySample {
  double v_hv;
  double v_av;
};

// Builds the discrepancy training set from a measured log: for each usable
// step j (j >= 5), input (v_hv[j-1], v_av[j-1]) and target
// v_hv[j] - arx prediction from the measured lags. Length = log size - 5.
gp::Dataset build_discrepancy_dataset(std::span<const VelocitySample> log,
                                      const ArxCoefficients& coeffs);

gp::Dataset subsample(const gp::Dataset& data, int stride);
gp::Dataset evenly_downselect(const gp::Dataset& data, int max_points);
gp::Dataset concat(const std::vector<gp::Dataset>& parts);

double rmse(std::span<const double> predicted, std::span<const double> actual);

}  // namespace platoon::hv

#endif  // PLATOON_HV_MODEL_HPP_
