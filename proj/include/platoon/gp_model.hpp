#ifndef PLATOON_GP_MODEL_HPP_
#define PLATOON_GP_MODEL_HPP_

#include <Eigen/Core>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "platoon/kernel.hpp"

namespace platoon::gp {

struct Dataset {
  Eigen::MatrixXd inputs;   // m x d, one point per row
  Eigen::VectorXd targets;  // m

  Eigen::Index size() const { return targets.size(); }
  Eigen::Index dim() const { return inputs.cols(); }
  void validate() const;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact GP posterior with a cached Cholesky factor of (K + sigma_n^2 I).
// Immutable after construction; predict() is const and thread-safe.
class GpModel {
 public:
  GpModel(Kernel kernel, double noise_variance, Dataset data);

  const Kernel& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  const Dataset& dataset() const { return data_; }
  double jitter() const { return jitter_; }

  struct Prediction {
    double mean;
    double variance;  // >= 0
  };

  Prediction predict(const Eigen::VectorXd& query) const;
  // One prediction per row of `queries`; parallelized over queries.
  void predict_batch(const Eigen::MatrixXd& queries, Eigen::VectorXd& means,
                     Eigen::VectorXd& variances) const;

  // Analytic gradient of the posterior mean with respect to the query point.
  Eigen::VectorXd mean_gradient(const Eigen::VectorXd& query) const;

  double log_marginal_likelihood() const { return lml_; }

  void save(std::ostream& os) const;
  static GpModel load(std::istream& is);
  void save_file(const std::string& path) const;
  static GpModel load_file(const std::string& path);

 private:
  Kernel kernel_;
  double noise_variance_;
  Dataset data_;
  Eigen::MatrixXd chol_lower_;  // L with L L^T = K + sigma_n^2 I + jitter I
  Eigen::VectorXd alpha_;       // (K + sigma_n^2 I)^{-1} y
  double jitter_ = 0.0;
  double lml_ = 0.0;
};

// Log marginal likelihood and its gradient with respect to
// logp = (log sigma_f, log l_1, ..., log l_d, log sigma_n).
struct LmlValue {
  double value;
  Eigen::VectorXd grad;
};
LmlValue log_marginal_likelihood_with_grad(const Dataset& data,
                                           const Eigen::VectorXd& logp);

// Cholesky of S with adaptive jitter: starts at 1e-10, escalates x10 up to
// 1e-4, then throws NumericalError. Returns the applied jitter.
double jittered_cholesky(const Eigen::MatrixXd& S, Eigen::MatrixXd& lower);

}  // namespace platoon::gp

#endif  // PLATOON_GP_MODEL_HPP_
