#ifndef PLATOON_MPC_HPP_
#define PLATOON_MPC_HPP_

#include <Eigen/Core>
#include <optional>

#include "platoon/chance.hpp"
#include "platoon/dynamics.hpp"
#include "platoon/gp_model.hpp"
#include "platoon/hv_model.hpp"
#include "platoon/qp.hpp"

namespace platoon::mpc {

enum class Variant { nominal, gp };

struct MpcConfig {
  int horizon = 10;   // N
  double dt = 0.1;    // T
  double q1 = 5.0;    // leader velocity tracking weight
  double q2 = 5.0;    // neighbor velocity matching weight
  double r = 10.0;    // input weight
  double v_min = -35.0, v_max = 35.0;
  double a_min = -5.0, a_max = 5.0;
  DistancePolicy policy{20.0, 0.95};
  Variant variant = Variant::gp;

  int sqp_max_iterations = 10;
  double sqp_tolerance = 1e-4;      // trajectory-change infinity norm
  double slack_penalty = 1e6;       // per squared meter
  double slack_report_threshold = 1e-4;
  QpSettings qp;

  void validate() const;
};

enum class SolveStatus { optimal, max_iterations, infeasible_relaxed };

struct MpcSolution {
  Eigen::MatrixXd accelerations;    // n_av x N
  Eigen::MatrixXd velocities;       // n_av x (N+1), step 0 = current
  Eigen::MatrixXd positions;        // n_av x (N+1)
  Eigen::VectorXd hv_velocity;      // N+1, nominal recursion chain
  Eigen::VectorXd hv_mean;          // N+1, position belief mean
  Eigen::VectorXd hv_variance;      // N+1
  Eigen::VectorXd tightened_bound;  // N entries, horizon steps 1..N
  double cost = 0.0;
  double slack = 0.0;
  int sqp_iterations = 0;
  int qp_iterations = 0;
  SolveStatus status = SolveStatus::optimal;
};

// Velocity trajectories the GP terms are evaluated along.
struct Trajectory {
  Eigen::VectorXd hv;  // N+1
  Eigen::MatrixXd av;  // n_av x (N+1)
};

// Receding-horizon controller for the whole platoon. A controller instance
// keeps warm-start state between calls and is not thread-safe; use one
// instance per simulation.
class MpcController {
 public:
  MpcController(const MpcConfig& config, const hv::ArxCoefficients& coeffs,
                const gp::GpModel* gp);

  MpcSolution solve(const PlatoonState& state, double v_ref);

  // Exposed for testing.
  QpProblem build_qp_subproblem(const PlatoonState& state, double v_ref,
                                const Trajectory& linearization) const;
  Trajectory constant_velocity_rollout(const PlatoonState& state) const;

  struct RowLayout {
    int av_av_offset, av_av_count;
    int av_hv_offset, av_hv_count;
    int velocity_offset, velocity_count;
    int accel_offset, accel_count;
    int slack_offset;
  };
  RowLayout row_layout(int n_av) const;
  int num_vars(int n_av) const { return n_av * config_.horizon + 1; }

  void reset();

 private:
  MpcConfig config_;
  hv::ArxCoefficients coeffs_;
  const gp::GpModel* gp_;  // null for the nominal variant

  std::optional<Trajectory> warm_traj_;
  Eigen::VectorXd warm_x_, warm_y_;

  Trajectory rollout_from(const PlatoonState& state,
                          const Eigen::VectorXd& u) const;
  const Eigen::MatrixXd& terminal_weight(int n_av) const;

  mutable Eigen::MatrixXd terminal_p_;  // cached per platoon size
  mutable int terminal_na_ = 0;
};

}  // namespace platoon::mpc

#endif  // PLATOON_MPC_HPP_
