#ifndef PLATOON_KERNEL_HPP_
#define PLATOON_KERNEL_HPP_

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace platoon::gp {

// Squared-exponential kernel with per-dimension length scales.
struct Kernel {
  double signal_variance = 1.0;     // sigma_f^2, value at zero distance
  Eigen::VectorXd length_scales;    // one positive scale per input dimension

  void validate() const {
    if (!(signal_variance > 0.0))
      throw std::invalid_argument("kernel: signal_variance must be > 0");
    if (length_scales.size() == 0)
      throw std::invalid_argument("kernel: length_scales must be non-empty");
    for (Eigen::Index i = 0; i < length_scales.size(); ++i)
      if (!(length_scales[i] > 0.0))
        throw std::invalid_argument("kernel: length_scales must be > 0");
  }

  Eigen::Index input_dim() const { return length_scales.size(); }
};

inline double kernel_eval(const Kernel& k, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y) {
  if (x.size() != k.length_scales.size() || y.size() != k.length_scales.size())
    throw std::invalid_argument("kernel_eval: input dimension mismatch");
  double s = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double d = (x[j] - y[j]) / k.length_scales[j];
    s += d * d;
  }
  return k.signal_variance * std::exp(-0.5 * s);
}

// Gradient of k(x, y) with respect to x.
inline Eigen::VectorXd kernel_grad_x(const Kernel& k, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y) {
  const double kv = kernel_eval(k, x, y);
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j)
    g[j] = kv * (y[j] - x[j]) / (k.length_scales[j] * k.length_scales[j]);
  return g;
}

}  // namespace platoon::gp

#endif  // PLATOON_KERNEL_HPP_
