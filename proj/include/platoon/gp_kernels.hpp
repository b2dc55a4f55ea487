#ifndef PLATOON_GP_KERNELS_HPP_
#define PLATOON_GP_KERNELS_HPP_

#include <Eigen/Core>

#include "platoon/kernel.hpp"

namespace platoon::gp {

// Batch kernel evaluations. The OpenMP variants parallelize over rows; every
// output entry is computed independently, so results are bit-identical to the
// serial reference for any thread count. Inputs are row-major point sets
// (one point per row).

Eigen::MatrixXd kernel_matrix_serial(const Kernel& k, const Eigen::MatrixXd& X);
Eigen::MatrixXd kernel_matrix(const Kernel& k, const Eigen::MatrixXd& X);

Eigen::MatrixXd cross_covariance_serial(const Kernel& k, const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& B);
Eigen::MatrixXd cross_covariance(const Kernel& k, const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B);

}  // namespace platoon::gp

#endif  // PLATOON_GP_KERNELS_HPP_
