#include "platoon/gp_kernels.hpp"

#include "platoon/parallel.hpp"

namespace platoon::gp {

namespace {

inline double entry(const Kernel& k, const Eigen::MatrixXd& A, Eigen::Index i,
                    const Eigen::MatrixXd& B, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < A.cols(); ++c) {
    const double d = (A(i, c) - B(j, c)) / k.length_scales[c];
    s += d * d;
  }
  return k.signal_variance * std::exp(-0.5 * s);
}

}  // namespace

Eigen::MatrixXd kernel_matrix_serial(const Kernel& k, const Eigen::MatrixXd& X) {
  const Eigen::Index m = X.rows();
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    K(i, i) = k.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = entry(k, X, i, X, j);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Eigen::MatrixXd kernel_matrix(const Kernel& k, const Eigen::MatrixXd& X) {
  const Eigen::Index m = X.rows();
  Eigen::MatrixXd K(m, m);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < m; ++i) {
    K(i, i) = k.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = entry(k, X, i, X, j);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Eigen::MatrixXd cross_covariance_serial(const Kernel& k, const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.rows(); ++j) K(i, j) = entry(k, A, i, B, j);
  return K;
}

Eigen::MatrixXd cross_covariance(const Kernel& k, const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows(), B.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.rows(); ++j) K(i, j) = entry(k, A, i, B, j);
  return K;
}

}  // namespace platoon::gp
