#include <doctest.h>

#include <random>
#include <vector>

#include "platoon/gp_fit.hpp"
#include "platoon/hv_model.hpp"
#include "platoon/truth_gen.hpp"

using namespace platoon::hv;
namespace pgp = platoon::gp;

namespace {

// Pure nominal rollout used as an oracle for the truth generator.
std::vector<double> pure_arx_rollout(const ArxCoefficients& coeffs,
                                     const std::vector<double>& av, double v0) {
  VelocityHistory h = VelocityHistory::constant(v0, v0);
  std::vector<double> out(av.size());
  for (std::size_t k = 0; k < av.size(); ++k) {
    out[k] = arx_step(coeffs, h);
    h.push(out[k], av[k]);
  }
  return out;
}

std::vector<VelocitySample> zip_log(const std::vector<double>& vh,
                                    const std::vector<double>& av) {
  std::vector<VelocitySample> log(vh.size());
  for (std::size_t i = 0; i < vh.size(); ++i) log[i] = {vh[i], av[i]};
  return log;
}

}  // namespace

TEST_CASE("published coefficients track a constant history") {
  const auto coeffs = ArxCoefficients::identified();
  const auto hist = VelocityHistory::constant(10.0, 10.0);
  CHECK(arx_step(coeffs, hist) == doctest::Approx(10.0).epsilon(1e-4));
}

TEST_CASE("zero history maps to zero") {
  const auto coeffs = ArxCoefficients::identified();
  CHECK(arx_step(coeffs, VelocityHistory::constant(0.0, 0.0)) == 0.0);
}

TEST_CASE("step response settles at the DC gain") {
  const auto coeffs = ArxCoefficients::identified();
  const double w = 17.0;
  VelocityHistory h = VelocityHistory::constant(0.0, 0.0);
  double v = 0.0;
  for (int k = 0; k < 2000; ++k) {
    v = arx_step(coeffs, h);
    CHECK(std::abs(v) < 100.0);  // bounded throughout
    h.push(v, w);
  }
  CHECK(v == doctest::Approx(w * coeffs.dc_gain()).epsilon(1e-3));
  CHECK(std::abs(v - w) <= 1e-3 * w);
}

TEST_CASE("DC gain of the published coefficients is one") {
  CHECK(std::abs(ArxCoefficients::identified().dc_gain() - 1.0) < 2e-3);
}

TEST_CASE("the recursion is linear in its history") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  const auto coeffs = ArxCoefficients::identified();
  for (int t = 0; t < 50; ++t) {
    VelocityHistory a, b, sum;
    for (int i = 0; i < 4; ++i) {
      a.hv[i] = u(rng);
      a.av[i] = u(rng);
      b.hv[i] = u(rng);
      b.av[i] = u(rng);
      sum.hv[i] = a.hv[i] + b.hv[i];
      sum.av[i] = a.av[i] + b.av[i];
    }
    CHECK(arx_step(coeffs, sum) ==
          doctest::Approx(arx_step(coeffs, a) + arx_step(coeffs, b))
              .epsilon(1e-10));
  }
}

TEST_CASE("corrected step with an uninformative GP reverts to the recursion") {
  const auto coeffs = ArxCoefficients::identified();
  pgp::Dataset d;
  d.inputs.resize(4, 2);
  d.inputs << 0, 0, 5, 5, 10, 10, 15, 15;
  d.targets = Eigen::VectorXd::Zero(4);
  pgp::Kernel k;
  k.signal_variance = 1.0;
  k.length_scales = Eigen::Vector2d(3.0, 3.0);
  const pgp::GpModel gp(k, 1e-6, d);
  const auto hist = VelocityHistory::constant(7.0, 8.0);
  const auto step = corrected_step(coeffs, gp, hist);
  CHECK(step.mean == doctest::Approx(arx_step(coeffs, hist)).epsilon(1e-6));
  const auto direct = gp.predict(Eigen::Vector2d(7.0, 8.0));
  CHECK(step.variance == direct.variance);
}

TEST_CASE("discrepancy targets vanish when the truth is the recursion") {
  const auto coeffs = ArxCoefficients::identified();
  std::vector<double> av(200);
  for (std::size_t k = 0; k < av.size(); ++k)
    av[k] = 10.0 + 5.0 * std::sin(0.05 * static_cast<double>(k));
  const auto vh = pure_arx_rollout(coeffs, av, 0.0);
  const auto ds = build_discrepancy_dataset(zip_log(vh, av), coeffs);
  CHECK(ds.size() == 195);
  CHECK(ds.targets.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("a constant per-step output offset appears directly in the targets") {
  const auto coeffs = ArxCoefficients::identified();
  std::vector<double> av(100, 15.0);
  // Truth recursion with +0.5 added to every step's output.
  VelocityHistory h = VelocityHistory::constant(0.0, 0.0);
  std::vector<double> vh(av.size());
  for (std::size_t k = 0; k < av.size(); ++k) {
    vh[k] = arx_step(coeffs, h) + 0.5;
    h.push(vh[k], av[k]);
  }
  const auto ds = build_discrepancy_dataset(zip_log(vh, av), coeffs);
  for (Eigen::Index i = 0; i < ds.size(); ++i)
    CHECK(ds.targets[i] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("every-5th subsampling of a 600-step log yields 119 points") {
  const auto coeffs = ArxCoefficients::identified();
  std::vector<double> av(600, 12.0);
  const auto vh = pure_arx_rollout(coeffs, av, 0.0);
  const auto ds = build_discrepancy_dataset(zip_log(vh, av), coeffs);
  CHECK(ds.size() == 595);
  CHECK(subsample(ds, 5).size() == 119);
}

TEST_CASE("short logs are rejected") {
  const auto coeffs = ArxCoefficients::identified();
  std::vector<VelocitySample> log(5, {1.0, 1.0});
  CHECK_THROWS_AS(build_discrepancy_dataset(log, coeffs),
                  std::invalid_argument);
}

TEST_CASE("truth generator reduces to the pure recursion") {
  TruthHvSpec spec;
  spec.base = ArxCoefficients::identified();
  spec.reaction_delay_steps = 0;
  spec.accel_increment_limit = 1e9;
  spec.brake_increment_limit = 1e9;
  spec.noise_std = 0.0;
  const auto av = synthetic_av_profile(4, 400, 0.1);
  const auto truth = simulate_truth_hv(spec, av, 0.0);
  const auto oracle = pure_arx_rollout(spec.base, av, 0.0);
  for (std::size_t k = 0; k < av.size(); ++k)
    CHECK(truth[k] == doctest::Approx(oracle[k]).epsilon(1e-12));
}

TEST_CASE("truth generator is deterministic given its seed") {
  TruthHvSpec spec;
  spec.base = ArxCoefficients::identified();
  spec.noise_std = 0.05;
  spec.seed = 55;
  const auto av = synthetic_av_profile(9, 300, 0.1);
  const auto a = simulate_truth_hv(spec, av, 0.0);
  const auto b = simulate_truth_hv(spec, av, 0.0);
  CHECK(a == b);
}

TEST_CASE("injected noise has the configured scale") {
  TruthHvSpec spec;
  spec.base = ArxCoefficients::identified();
  spec.reaction_delay_steps = 0;
  spec.accel_increment_limit = 1e9;
  spec.brake_increment_limit = 1e9;
  spec.noise_std = 0.1;
  spec.seed = 55;
  std::vector<double> av(1000, 15.0);
  const auto truth = simulate_truth_hv(spec, av, 15.0);

  // The same generator without noise, step by step; the per-step noise is
  // the difference between the measured value and the recursion driven by
  // the measured (noisy) lags.
  TruthHvSpec clean = spec;
  clean.noise_std = 0.0;
  VelocityHistory h = VelocityHistory::constant(15.0, 15.0);
  std::vector<double> residual(truth.size());
  for (std::size_t k = 0; k < truth.size(); ++k) {
    residual[k] = truth[k] - arx_step(clean.base, h);
    h.push(truth[k], av[k]);
  }
  double mean = 0.0, var = 0.0;
  for (double r : residual) mean += r;
  mean /= static_cast<double>(residual.size());
  for (double r : residual) var += (r - mean) * (r - mean);
  var /= static_cast<double>(residual.size() - 1);
  const double sd = std::sqrt(var);
  CHECK(sd > 0.08);
  CHECK(sd < 0.12);
}

TEST_CASE("rmse basics") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(rmse(a, a) == 0.0);
  const std::vector<double> b{2.0, 3.0, 4.0};
  CHECK(rmse(b, a) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> p{0.0, 0.0}, q{3.0, 4.0};
  CHECK(rmse(p, q) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
  const std::vector<double> longer{1.0, 2.0, 3.0, 4.0};
  CHECK_THROWS_AS(rmse(a, longer), std::invalid_argument);
}

TEST_CASE("learned discrepancy reproduces training velocities within 2 sigma") {
  TruthHvSpec spec;
  spec.base = ArxCoefficients::identified();
  spec.reaction_delay_steps = 2;
  spec.accel_increment_limit = 0.45;
  spec.brake_increment_limit = 0.40;
  spec.noise_std = 0.008;
  spec.seed = 58;
  const auto av = synthetic_av_profile(21, 1200, 0.1);
  const auto vh = simulate_truth_hv(spec, av, 0.0);
  const auto log = zip_log(vh, av);
  const auto full = build_discrepancy_dataset(log, spec.base);
  const auto train = subsample(full, 5);

  pgp::FitOptions opt;
  opt.restarts = 4;
  opt.seed = 8;
  const pgp::GpModel gp = pgp::fit(train, opt);

  int within = 0;
  for (Eigen::Index i = 0; i < train.size(); ++i) {
    // Reconstruct the history for this training row from the log.
    const Eigen::Index j = 5 + i * 5;
    VelocityHistory h;
    for (int l = 0; l < 4; ++l) {
      h.hv[l] = log[j - 1 - l].v_hv;
      h.av[l] = log[j - 1 - l].v_av;
    }
    const auto step = corrected_step(spec.base, gp, h);
    const double sigma = std::sqrt(step.variance + gp.noise_variance());
    if (std::abs(step.mean - log[j].v_hv) <= 2.0 * sigma) ++within;
  }
  CHECK(static_cast<double>(within) >=
        0.95 * static_cast<double>(train.size()));
}
