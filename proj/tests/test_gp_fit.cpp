#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "platoon/gp_fit.hpp"
#include "platoon/gp_kernels.hpp"

using namespace platoon::gp;

namespace {

Kernel make_kernel(double sf2, double l1, double l2) {
  Kernel k;
  k.signal_variance = sf2;
  k.length_scales = Eigen::Vector2d(l1, l2);
  return k;
}

// Draws a dataset from a known GP prior plus observation noise.
Dataset sample_from_gp(const Kernel& k, double noise_var, int m,
                       std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset d;
  d.inputs.resize(m, 2);
  for (int i = 0; i < m; ++i) {
    d.inputs(i, 0) = u(rng);
    d.inputs(i, 1) = u(rng);
  }
  Eigen::MatrixXd K = kernel_matrix_serial(k, d.inputs);
  K.diagonal().array() += 1e-10;
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(K).matrixL();
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) z[i] = g(rng);
  d.targets = L * z;
  for (int i = 0; i < m; ++i) d.targets[i] += std::sqrt(noise_var) * g(rng);
  return d;
}

double heldout_loglik(const GpModel& model, const Dataset& test) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    const auto p = model.predict(test.inputs.row(i).transpose());
    const double var = p.variance + model.noise_variance();
    const double e = test.targets[i] - p.mean;
    acc += -0.5 * std::log(2.0 * M_PI * var) - 0.5 * e * e / var;
  }
  return acc;
}

}  // namespace

TEST_CASE("fit recovers the generating hyperparameters to within a factor") {
  std::mt19937_64 rng(101);
  const Kernel truth = make_kernel(1.0, 0.5, 0.5);
  const double noise = 0.01;
  const Dataset train = sample_from_gp(truth, noise, 50, rng);
  const Dataset test = sample_from_gp(truth, noise, 40, rng);

  FitOptions opt;
  opt.restarts = 5;
  opt.seed = 2024;
  const GpModel model = fit(train, opt);

  CHECK(model.kernel().signal_variance > 0.5);
  CHECK(model.kernel().signal_variance < 2.0);
  CHECK(model.kernel().length_scales[0] > 0.25);
  CHECK(model.kernel().length_scales[0] < 1.0);
  CHECK(model.kernel().length_scales[1] > 0.25);
  CHECK(model.kernel().length_scales[1] < 1.0);

  const GpModel reference(truth, noise, train);
  const double ll_fit = heldout_loglik(model, test);
  const double ll_true = heldout_loglik(reference, test);
  CHECK(ll_fit >= ll_true - 0.05 * std::abs(ll_true));
}

TEST_CASE("two points with identical targets fit without trouble") {
  Dataset d;
  d.inputs.resize(2, 2);
  d.inputs << 0.0, 0.0, 10.0, 10.0;
  d.targets.resize(2);
  d.targets << 3.0, 3.0;
  FitOptions opt;
  opt.restarts = 3;
  opt.seed = 5;
  const GpModel model = fit(d, opt);
  for (int i = 0; i < 2; ++i) {
    const auto p = model.predict(d.inputs.row(i).transpose());
    const double sigma =
        std::sqrt(p.variance + model.noise_variance());
    CHECK(std::abs(p.mean - d.targets[i]) <= 3.0 * sigma + 1e-9);
  }
}

TEST_CASE("fitting is deterministic given the seed") {
  std::mt19937_64 rng(77);
  const Dataset d = sample_from_gp(make_kernel(1.0, 0.7, 0.9), 0.02, 25, rng);
  FitOptions opt;
  opt.restarts = 4;
  opt.seed = 99;
  const GpModel a = fit(d, opt);
  const GpModel b = fit(d, opt);
  CHECK(a.kernel().signal_variance == b.kernel().signal_variance);
  CHECK(a.kernel().length_scales[0] == b.kernel().length_scales[0]);
  CHECK(a.kernel().length_scales[1] == b.kernel().length_scales[1]);
  CHECK(a.noise_variance() == b.noise_variance());
}

TEST_CASE("degenerate dataset with zero fixed noise is rejected") {
  Dataset d;
  d.inputs.resize(3, 2);
  d.inputs << 1.0, 2.0, 1.0, 2.0, 1.0, 2.0;
  d.targets.resize(3);
  d.targets << 0.1, 0.2, 0.3;
  FitOptions opt;
  opt.fixed_noise_variance = 0.0;
  CHECK_THROWS_WITH_AS(fit(d, opt),
                       doctest::Contains("degenerate"), FitError);
}

TEST_CASE("fit rejects singleton datasets and zero restarts") {
  Dataset d;
  d.inputs.resize(1, 2);
  d.inputs << 0.0, 0.0;
  d.targets.resize(1);
  d.targets << 1.0;
  CHECK_THROWS_AS(fit(d, {}), FitError);
}
