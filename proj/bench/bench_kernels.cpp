// Times the OpenMP kernel paths against the serial reference and verifies
// they produce identical bits.

#include <chrono>
#include <cstdio>
#include <random>

#include "platoon/gp_kernels.hpp"
#include "platoon/gp_model.hpp"
#include "platoon/parallel.hpp"

using namespace platoon::gp;
using Clock = std::chrono::steady_clock;

namespace {

Eigen::MatrixXd random_points(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 25.0);
  Eigen::MatrixXd X(n, 2);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = u(rng);
    X(i, 1) = u(rng);
  }
  return X;
}

template <typename F>
double time_ms(F&& f, int reps) {
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() /
         reps;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", omp_get_max_threads());
  std::printf("%-28s %8s %10s %10s %8s\n", "benchmark", "m", "serial ms",
              "openmp ms", "speedup");

  Kernel k;
  k.signal_variance = 0.01;
  k.length_scales = Eigen::Vector2d(3.0, 4.0);
  std::mt19937_64 rng(7);

  for (int m : {100, 300, 800, 1600}) {
    const Eigen::MatrixXd X = random_points(rng, m);
    const int reps = m <= 300 ? 20 : 5;
    Eigen::MatrixXd out_serial, out_omp;
    const double ts =
        time_ms([&] { out_serial = kernel_matrix_serial(k, X); }, reps);
    const double tp = time_ms([&] { out_omp = kernel_matrix(k, X); }, reps);
    const bool same = (out_serial - out_omp).cwiseAbs().maxCoeff() == 0.0;
    std::printf("%-28s %8d %10.3f %10.3f %7.2fx%s\n", "kernel_matrix", m, ts,
                tp, ts / tp, same ? "" : "  MISMATCH");
  }

  for (int m : {100, 300, 800}) {
    const Eigen::MatrixXd X = random_points(rng, m);
    const Eigen::MatrixXd Q = random_points(rng, 500);
    const int reps = 10;
    Eigen::MatrixXd out_serial, out_omp;
    const double ts =
        time_ms([&] { out_serial = cross_covariance_serial(k, Q, X); }, reps);
    const double tp = time_ms([&] { out_omp = cross_covariance(k, Q, X); },
                              reps);
    const bool same = (out_serial - out_omp).cwiseAbs().maxCoeff() == 0.0;
    std::printf("%-28s %8d %10.3f %10.3f %7.2fx%s\n", "cross_covariance(500,m)",
                m, ts, tp, ts / tp, same ? "" : "  MISMATCH");
  }

  for (int m : {100, 400}) {
    const Eigen::MatrixXd X = random_points(rng, m);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) y[i] = std::sin(X(i, 0));
    Dataset d{X, y};
    const GpModel model(k, 1e-4, d);
    const Eigen::MatrixXd Q = random_points(rng, 2000);
    Eigen::VectorXd means, vars;
    const double tp =
        time_ms([&] { model.predict_batch(Q, means, vars); }, 5);
    Eigen::VectorXd means_s(2000), vars_s(2000);
    const double ts = time_ms(
        [&] {
          for (int i = 0; i < 2000; ++i) {
            const auto p = model.predict(Q.row(i).transpose());
            means_s[i] = p.mean;
            vars_s[i] = p.variance;
          }
        },
        5);
    const bool same = (means - means_s).cwiseAbs().maxCoeff() == 0.0 &&
                      (vars - vars_s).cwiseAbs().maxCoeff() == 0.0;
    std::printf("%-28s %8d %10.3f %10.3f %7.2fx%s\n", "predict_batch(2000)", m,
                ts, tp, ts / tp, same ? "" : "  MISMATCH");
  }
  return 0;
}
