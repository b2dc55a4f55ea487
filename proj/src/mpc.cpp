#include "platoon/mpc.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace platoon::mpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Affine {
  Eigen::VectorXd lin;
  double c = 0.0;

  explicit Affine(Eigen::Index nv) : lin(Eigen::VectorXd::Zero(nv)) {}
  static Affine constant(Eigen::Index nv, double value) {
    Affine a(nv);
    a.c = value;
    return a;
  }
  double eval(const Eigen::VectorXd& u) const { return lin.dot(u) + c; }
};

Affine operator+(Affine a, const Affine& b) {
  a.lin += b.lin;
  a.c += b.c;
  return a;
}
Affine operator-(Affine a, const Affine& b) {
  a.lin -= b.lin;
  a.c -= b.c;
  return a;
}
Affine operator*(double s, Affine a) {
  a.lin *= s;
  a.c *= s;
  return a;
}

// All affine chains of one linearized subproblem.
struct HorizonModel {
  std::vector<std::vector<Affine>> vel;  // [na][N+1]
  std::vector<std::vector<Affine>> pos;  // [na][N+1]
  std::vector<Affine> vh;                // N+1, nominal recursion
  std::vector<Affine> mu;                // N+1, position mean
  Eigen::VectorXd sigma;                 // N+1, position variance
  Eigen::VectorXd bound;                 // N, tightened bound at steps 1..N
};

}  // namespace

void MpcConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("mpc: horizon must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("mpc: dt must be > 0");
  if (!(q1 > 0.0) || !(q2 > 0.0) || !(r > 0.0))
    throw std::invalid_argument("mpc: weights must be > 0");
  if (!(v_min < v_max)) throw std::invalid_argument("mpc: v_min < v_max");
  if (!(a_min < a_max)) throw std::invalid_argument("mpc: a_min < a_max");
}

MpcController::MpcController(const MpcConfig& config,
                             const hv::ArxCoefficients& coeffs,
                             const gp::GpModel* gp)
    : config_(config), coeffs_(coeffs), gp_(gp) {
  config_.validate();
  coeffs_.validate();
  if (config_.variant == Variant::gp && gp_ == nullptr)
    throw std::invalid_argument("mpc: gp variant requires a GP model");
  if (config_.variant == Variant::nominal) gp_ = nullptr;
  if (gp_ && gp_->kernel().input_dim() != 2)
    throw std::invalid_argument("mpc: GP input dimension must be 2");
}

void MpcController::reset() {
  warm_traj_.reset();
  warm_x_.resize(0);
  warm_y_.resize(0);
}

MpcController::RowLayout MpcController::row_layout(int n_av) const {
  const int N = config_.horizon;
  RowLayout l{};
  l.av_av_offset = 0;
  l.av_av_count = (n_av - 1) * N;
  l.av_hv_offset = l.av_av_offset + l.av_av_count;
  l.av_hv_count = N;
  l.velocity_offset = l.av_hv_offset + l.av_hv_count;
  l.velocity_count = n_av * N;
  l.accel_offset = l.velocity_offset + l.velocity_count;
  l.accel_count = n_av * N;
  l.slack_offset = l.accel_offset + l.accel_count;
  return l;
}

// Infinite-horizon Riccati weight for the velocity-error chain
// (e1, ..., e_na) = (v1 - ref, v2 - v1, ...). The stage costs alone make a
// 10-step horizon myopic: the closed loop converges far slower than the
// underlying LQR, so the unconstrained tail value is added at the horizon
// end.
const Eigen::MatrixXd& MpcController::terminal_weight(int n_av) const {
  if (terminal_na_ == n_av) return terminal_p_;
  const double T = config_.dt;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n_av, n_av);
  Q(0, 0) = config_.q1;
  for (int j = 1; j < n_av; ++j) Q(j, j) = config_.q2;
  const Eigen::MatrixXd R =
      config_.r * Eigen::MatrixXd::Identity(n_av, n_av);
  // e' = e + T D a with D the velocity-differencing map.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n_av, n_av);
  for (int j = 0; j < n_av; ++j) {
    B(j, j) = T;
    if (j > 0) B(j, j - 1) = -T;
  }
  Eigen::MatrixXd P = Q;
  for (int it = 0; it < 10000; ++it) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    const Eigen::MatrixXd next =
        Q + P - BtP.transpose() * (R + BtP * B).ldlt().solve(BtP);
    const double delta = (next - P).cwiseAbs().maxCoeff();
    P = next;
    if (delta < 1e-12) break;
  }
  terminal_p_ = P;
  terminal_na_ = n_av;
  return terminal_p_;
}

Trajectory MpcController::constant_velocity_rollout(
    const PlatoonState& state) const {
  const int N = config_.horizon;
  const int na = static_cast<int>(state.avs.size());
  Trajectory t;
  t.av.resize(na, N + 1);
  for (int j = 0; j < na; ++j) t.av.row(j).setConstant(state.avs[j].velocity);
  t.hv.resize(N + 1);
  t.hv[0] = state.hv_velocity;
  hv::VelocityHistory h = state.history;
  h.push(state.hv_velocity, state.avs[na - 1].velocity);
  for (int i = 1; i <= N; ++i) {
    t.hv[i] = hv::arx_step(coeffs_, h);
    h.push(t.hv[i], state.avs[na - 1].velocity);
  }
  return t;
}

Trajectory MpcController::rollout_from(const PlatoonState& state,
                                       const Eigen::VectorXd& u) const {
  const int N = config_.horizon;
  const int na = static_cast<int>(state.avs.size());
  const double T = config_.dt;
  Trajectory t;
  t.av.resize(na, N + 1);
  for (int j = 0; j < na; ++j) {
    t.av(j, 0) = state.avs[j].velocity;
    for (int i = 1; i <= N; ++i)
      t.av(j, i) = t.av(j, i - 1) + T * u[j * N + i - 1];
  }
  t.hv.resize(N + 1);
  t.hv[0] = state.hv_velocity;
  hv::VelocityHistory h = state.history;
  h.push(state.hv_velocity, t.av(na - 1, 0));
  for (int i = 1; i <= N; ++i) {
    t.hv[i] = hv::arx_step(coeffs_, h);
    h.push(t.hv[i], t.av(na - 1, i));
  }
  return t;
}

namespace {

HorizonModel build_horizon(const MpcConfig& config,
                           const hv::ArxCoefficients& coeffs,
                           const gp::GpModel* gp, const PlatoonState& state,
                           const Trajectory& traj) {
  const int N = config.horizon;
  const int na = static_cast<int>(state.avs.size());
  const double T = config.dt;
  const Eigen::Index nv = static_cast<Eigen::Index>(na) * N + 1;
  const auto var_index = [N](int j, int i) { return j * N + i; };

  HorizonModel m;
  m.vel.assign(na, std::vector<Affine>(N + 1, Affine(nv)));
  m.pos.assign(na, std::vector<Affine>(N + 1, Affine(nv)));
  for (int j = 0; j < na; ++j) {
    m.vel[j][0] = Affine::constant(nv, state.avs[j].velocity);
    m.pos[j][0] = Affine::constant(nv, state.avs[j].position);
    for (int i = 1; i <= N; ++i) {
      m.vel[j][i] = m.vel[j][i - 1];
      m.vel[j][i].lin[var_index(j, i - 1)] += T;
      m.pos[j][i] = m.pos[j][i - 1] + T * m.vel[j][i - 1];
    }
  }

  // Nominal HV velocity recursion; negative lags come from the measured
  // history buffers.
  m.vh.assign(N + 1, Affine(nv));
  m.vh[0] = Affine::constant(nv, state.hv_velocity);
  const auto& hist = state.history;
  for (int i = 1; i <= N; ++i) {
    Affine acc(nv);
    for (int l = 1; l <= 4; ++l) {
      const int idx = i - l;
      if (idx >= 0)
        acc = acc + (-coeffs.c[l - 1]) * m.vh[idx];
      else
        acc.c += -coeffs.c[l - 1] * hist.hv[-idx - 1];
      if (idx >= 0)
        acc = acc + coeffs.b[l - 1] * m.vel[na - 1][idx];
      else
        acc.c += coeffs.b[l - 1] * hist.av[-idx - 1];
    }
    m.vh[i] = acc;
  }

  // Position mean and variance chains. The GP enters the mean linearly
  // around the given trajectory; the variance is held fixed per subproblem.
  m.mu.assign(N + 1, Affine(nv));
  m.mu[0] = Affine::constant(nv, state.hv_position_mean);
  m.sigma = Eigen::VectorXd::Zero(N + 1);
  for (int i = 0; i < N; ++i) {
    Affine gp_mean(nv);
    double gp_var = 0.0;
    if (gp != nullptr) {
      if (i == 0) {
        const Eigen::Vector2d q(hist.hv[0], hist.av[0]);
        const auto p = gp->predict(q);
        gp_mean.c = p.mean;
        gp_var = p.variance;
      } else {
        const Eigen::Vector2d q(traj.hv[i - 1], traj.av(na - 1, i - 1));
        const auto p = gp->predict(q);
        const Eigen::VectorXd J = gp->mean_gradient(q);
        gp_mean = J[0] * m.vh[i - 1] + J[1] * m.vel[na - 1][i - 1];
        gp_mean.c += p.mean - J[0] * q[0] - J[1] * q[1];
        gp_var = p.variance;
      }
    }
    m.mu[i + 1] = m.mu[i] + T * m.vh[i] + T * gp_mean;
    m.sigma[i + 1] = m.sigma[i] + T * T * gp_var;
  }

  m.bound.resize(N);
  for (int i = 1; i <= N; ++i)
    m.bound[i - 1] = tightened_min_distance(config.policy, m.sigma[i]);
  return m;
}

}  // namespace

QpProblem MpcController::build_qp_subproblem(const PlatoonState& state,
                                             double v_ref,
                                             const Trajectory& traj) const {
  const int N = config_.horizon;
  const int na = static_cast<int>(state.avs.size());
  if (na < 1) throw std::invalid_argument("mpc: empty platoon");
  if (state.hv_position_variance != 0.0)
    throw std::invalid_argument(
        "mpc: horizon must start from a measured state (variance 0)");
  for (const auto& av : state.avs)
    if (!std::isfinite(av.position) || !std::isfinite(av.velocity))
      throw std::invalid_argument("mpc: non-finite platoon state");
  if (!std::isfinite(state.hv_velocity) ||
      !std::isfinite(state.hv_position_mean))
    throw std::invalid_argument("mpc: non-finite HV state");

  const Eigen::Index nv = static_cast<Eigen::Index>(na) * N + 1;
  const Eigen::Index slack = nv - 1;
  const HorizonModel model =
      build_horizon(config_, coeffs_, gp_, state, traj);

  QpProblem qp;
  qp.P = Eigen::MatrixXd::Zero(nv, nv);
  qp.q = Eigen::VectorXd::Zero(nv);

  const auto add_sq = [&qp](const Affine& e, double w) {
    qp.P.noalias() += 2.0 * w * e.lin * e.lin.transpose();
    qp.q.noalias() += 2.0 * w * e.c * e.lin;
  };
  // Velocity error terms over horizon steps 0..N (the step-0 terms are
  // constants and only shift the objective), inputs over 0..N-1.
  for (int i = 0; i <= N; ++i) {
    Affine e = model.vel[0][i];
    e.c -= v_ref;
    add_sq(e, config_.q1);
  }
  for (int j = 1; j < na; ++j)
    for (int i = 0; i <= N; ++i)
      add_sq(model.vel[j][i] - model.vel[j - 1][i], config_.q2);
  for (int j = 0; j < na; ++j)
    for (int i = 0; i < N; ++i) qp.P(j * N + i, j * N + i) += 2.0 * config_.r;
  qp.P(slack, slack) += 2.0 * config_.slack_penalty;

  // Terminal tail value on the velocity-error chain at step N.
  {
    const Eigen::MatrixXd& Pterm = terminal_weight(na);
    std::vector<Affine> e;
    e.reserve(na);
    Affine e1 = model.vel[0][N];
    e1.c -= v_ref;
    e.push_back(e1);
    for (int j = 1; j < na; ++j)
      e.push_back(model.vel[j][N] - model.vel[j - 1][N]);
    for (int a = 0; a < na; ++a)
      for (int b = 0; b < na; ++b) {
        const double w = Pterm(a, b);
        if (w == 0.0) continue;
        qp.P.noalias() += w * (e[a].lin * e[b].lin.transpose() +
                               e[b].lin * e[a].lin.transpose());
        qp.q.noalias() += w * (e[a].c * e[b].lin + e[b].c * e[a].lin);
      }
  }

  const RowLayout layout = row_layout(na);
  const Eigen::Index rows = layout.slack_offset + 1;
  qp.A = Eigen::MatrixXd::Zero(rows, nv);
  qp.lower = Eigen::VectorXd::Constant(rows, -kInf);
  qp.upper = Eigen::VectorXd::Constant(rows, kInf);

  Eigen::Index row = layout.av_av_offset;
  for (int j = 1; j < na; ++j)
    for (int i = 1; i <= N; ++i, ++row) {
      Affine e = model.pos[j - 1][i] - model.pos[j][i];
      e.lin[slack] += 1.0;
      qp.A.row(row) = e.lin;
      qp.lower[row] = config_.policy.delta - e.c;
    }
  row = layout.av_hv_offset;
  for (int i = 1; i <= N; ++i, ++row) {
    Affine e = model.pos[na - 1][i] - model.mu[i];
    e.lin[slack] += 1.0;
    qp.A.row(row) = e.lin;
    qp.lower[row] = model.bound[i - 1] - e.c;
  }
  row = layout.velocity_offset;
  for (int j = 0; j < na; ++j)
    for (int i = 1; i <= N; ++i, ++row) {
      qp.A.row(row) = model.vel[j][i].lin;
      qp.lower[row] = config_.v_min - model.vel[j][i].c;
      qp.upper[row] = config_.v_max - model.vel[j][i].c;
    }
  row = layout.accel_offset;
  for (int j = 0; j < na; ++j)
    for (int i = 0; i < N; ++i, ++row) {
      qp.A(row, j * N + i) = 1.0;
      qp.lower[row] = config_.a_min;
      qp.upper[row] = config_.a_max;
    }
  qp.A(layout.slack_offset, slack) = 1.0;
  qp.lower[layout.slack_offset] = 0.0;

  return qp;
}

MpcSolution MpcController::solve(const PlatoonState& state, double v_ref) {
  const int N = config_.horizon;
  const int na = static_cast<int>(state.avs.size());
  if (!std::isfinite(v_ref))
    throw std::invalid_argument("mpc: non-finite reference velocity");

  Trajectory traj;
  if (warm_traj_.has_value() &&
      warm_traj_->av.rows() == na) {
    // Shift the previous prediction by one step.
    traj.av.resize(na, N + 1);
    traj.hv.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
      const int src = std::min(i + 1, N);
      traj.av.col(i) = warm_traj_->av.col(src);
      traj.hv[i] = warm_traj_->hv[src];
    }
    traj.av.col(0).setZero();
    for (int j = 0; j < na; ++j) traj.av(j, 0) = state.avs[j].velocity;
    traj.hv[0] = state.hv_velocity;
  } else {
    traj = constant_velocity_rollout(state);
  }

  MpcSolution sol;
  QpResult qpres;
  int sqp_it = 0;
  for (; sqp_it < config_.sqp_max_iterations; ++sqp_it) {
    const QpProblem qp = build_qp_subproblem(state, v_ref, traj);
    const Eigen::VectorXd* xw =
        warm_x_.size() == qp.num_vars() ? &warm_x_ : nullptr;
    const Eigen::VectorXd* yw =
        warm_y_.size() == qp.num_constraints() ? &warm_y_ : nullptr;
    qpres = solve_qp(qp, config_.qp, xw, yw);
    sol.qp_iterations += qpres.iterations;
    warm_x_ = qpres.x;
    warm_y_ = qpres.y;

    const Trajectory next = rollout_from(state, qpres.x);
    double delta = (next.hv - traj.hv).cwiseAbs().maxCoeff();
    delta = std::max(delta, (next.av - traj.av).cwiseAbs().maxCoeff());
    traj = next;
    if (delta < config_.sqp_tolerance) {
      ++sqp_it;
      break;
    }
  }

  // Final model evaluated at the accepted trajectory for reporting.
  const HorizonModel model =
      build_horizon(config_, coeffs_, gp_, state, traj);
  const Eigen::VectorXd& u = qpres.x;

  sol.accelerations.resize(na, N);
  for (int j = 0; j < na; ++j)
    for (int i = 0; i < N; ++i) sol.accelerations(j, i) = u[j * N + i];
  sol.velocities.resize(na, N + 1);
  sol.positions.resize(na, N + 1);
  for (int j = 0; j < na; ++j)
    for (int i = 0; i <= N; ++i) {
      sol.velocities(j, i) = model.vel[j][i].eval(u);
      sol.positions(j, i) = model.pos[j][i].eval(u);
    }
  sol.hv_velocity.resize(N + 1);
  sol.hv_mean.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    sol.hv_velocity[i] = model.vh[i].eval(u);
    sol.hv_mean[i] = model.mu[i].eval(u);
  }
  sol.hv_variance = model.sigma;
  sol.tightened_bound = model.bound;
  sol.slack = u[u.size() - 1];
  sol.sqp_iterations = sqp_it;

  // The objective of the program itself (slack penalty excluded).
  double cost = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double e1 = sol.velocities(0, i) - v_ref;
    cost += config_.q1 * e1 * e1;
    for (int j = 1; j < na; ++j) {
      const double e2 = sol.velocities(j, i) - sol.velocities(j - 1, i);
      cost += config_.q2 * e2 * e2;
    }
  }
  for (int j = 0; j < na; ++j)
    for (int i = 0; i < N; ++i)
      cost += config_.r * sol.accelerations(j, i) * sol.accelerations(j, i);
  sol.cost = cost;

  if (qpres.status == QpStatus::max_iterations)
    sol.status = SolveStatus::max_iterations;
  else if (sol.slack > config_.slack_report_threshold)
    sol.status = SolveStatus::infeasible_relaxed;
  else
    sol.status = SolveStatus::optimal;

  warm_traj_ = traj;
  return sol;
}

}  // namespace platoon::mpc
