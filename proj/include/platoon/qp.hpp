#ifndef PLATOON_QP_HPP_
#define PLATOON_QP_HPP_

#include <Eigen/Core>

namespace platoon::mpc {

// minimize 1/2 x'Px + q'x  subject to  lower <= Ax <= upper
struct QpProblem {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd A;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index num_vars() const { return q.size(); }
  Eigen::Index num_constraints() const { return lower.size(); }
};

struct QpSettings {
  double eps = 1e-8;          // absolute primal/dual residual tolerance
  int max_iterations = 20000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;         // over-relaxation
  int check_interval = 25;
  bool polish = true;
  int scaling_iterations = 10;
};

enum class QpStatus { optimal, max_iterations };

struct QpResult {
  Eigen::VectorXd x;  // primal
  Eigen::VectorXd y;  // dual (one multiplier per constraint row)
  QpStatus status = QpStatus::max_iterations;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  bool polished = false;
};

// Operator-splitting (ADMM) solver for small dense QPs with Ruiz
// equilibration and an active-set polish step. Deterministic: fixed
// iteration order, no randomization.
QpResult solve_qp(const QpProblem& qp, const QpSettings& settings = {},
                  const Eigen::VectorXd* x_warm = nullptr,
                  const Eigen::VectorXd* y_warm = nullptr);

}  // namespace platoon::mpc

#endif  // PLATOON_QP_HPP_
