#include "platoon/qp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace platoon::mpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Scaling {
  Eigen::VectorXd d;  // variable scaling
  Eigen::VectorXd e;  // constraint scaling
  double c = 1.0;     // cost scaling
};

// Modified Ruiz equilibration, as used by first-order QP solvers.
Scaling ruiz_equilibrate(Eigen::MatrixXd& P, Eigen::VectorXd& q,
                         Eigen::MatrixXd& A, int iterations) {
  const Eigen::Index n = q.size();
  const Eigen::Index m = A.rows();
  Scaling s;
  s.d = Eigen::VectorXd::Ones(n);
  s.e = Eigen::VectorXd::Ones(m);

  auto safe = [](double v) { return v < 1e-12 ? 1.0 : v; };

  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd dk(n), ek(m);
    for (Eigen::Index j = 0; j < n; ++j) {
      double cn = P.col(j).cwiseAbs().maxCoeff();
      if (m > 0) cn = std::max(cn, A.col(j).cwiseAbs().maxCoeff());
      dk[j] = 1.0 / std::sqrt(safe(cn));
    }
    for (Eigen::Index i = 0; i < m; ++i)
      ek[i] = 1.0 / std::sqrt(safe(A.row(i).cwiseAbs().maxCoeff()));

    P = dk.asDiagonal() * P * dk.asDiagonal();
    q = dk.cwiseProduct(q);
    if (m > 0) A = ek.asDiagonal() * A * dk.asDiagonal();
    s.d = s.d.cwiseProduct(dk);
    s.e = s.e.cwiseProduct(ek);

    double mean_col = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      mean_col += P.col(j).cwiseAbs().maxCoeff();
    mean_col /= static_cast<double>(n);
    const double ck = 1.0 / safe(std::max(mean_col, q.cwiseAbs().maxCoeff()));
    P *= ck;
    q *= ck;
    s.c *= ck;
  }
  return s;
}

struct Residuals {
  double primal;
  double dual;
};

// Polishing: solve the KKT system of the guessed active set in the original
// (unscaled) problem with tiny regularization plus iterative refinement.
bool polish(const QpProblem& qp, const Eigen::VectorXd& y_est, double eps,
            Eigen::VectorXd& x_out, Eigen::VectorXd& y_out) {
  const Eigen::Index n = qp.num_vars();
  const Eigen::Index m = qp.num_constraints();

  std::vector<Eigen::Index> active;
  std::vector<int> side;  // -1 lower, +1 upper
  for (Eigen::Index i = 0; i < m; ++i) {
    if (y_est[i] < 0.0 && qp.lower[i] > -kInf) {
      active.push_back(i);
      side.push_back(-1);
    } else if (y_est[i] > 0.0 && qp.upper[i] < kInf) {
      active.push_back(i);
      side.push_back(+1);
    }
  }
  const Eigen::Index na = static_cast<Eigen::Index>(active.size());

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + na, n + na);
  K.topLeftCorner(n, n) = qp.P;
  for (Eigen::Index a = 0; a < na; ++a) {
    K.block(0, n + a, n, 1) = qp.A.row(active[a]).transpose();
    K.block(n + a, 0, 1, n) = qp.A.row(active[a]);
  }
  Eigen::VectorXd rhs(n + na);
  rhs.head(n) = -qp.q;
  for (Eigen::Index a = 0; a < na; ++a)
    rhs[n + a] = side[a] < 0 ? qp.lower[active[a]] : qp.upper[active[a]];

  Eigen::MatrixXd Kreg = K;
  constexpr double delta = 1e-9;
  for (Eigen::Index i = 0; i < n; ++i) Kreg(i, i) += delta;
  for (Eigen::Index i = n; i < n + na; ++i) Kreg(i, i) -= delta;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Kreg);
  if (ldlt.info() != Eigen::Success) return false;

  Eigen::VectorXd sol = ldlt.solve(rhs);
  for (int ref = 0; ref < 3; ++ref) sol += ldlt.solve(rhs - K * sol);

  Eigen::VectorXd x = sol.head(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  for (Eigen::Index a = 0; a < na; ++a) y[active[a]] = sol[n + a];

  // KKT checks on the original data.
  const Eigen::VectorXd ax = m > 0 ? Eigen::VectorXd(qp.A * x)
                                   : Eigen::VectorXd::Zero(0);
  double rp = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double lo = qp.lower[i] - ax[i];
    const double hi = ax[i] - qp.upper[i];
    rp = std::max({rp, lo, hi});
  }
  const double rd =
      (qp.P * x + qp.q + (m > 0 ? Eigen::VectorXd(qp.A.transpose() * y)
                                : Eigen::VectorXd::Zero(n)))
          .cwiseAbs()
          .maxCoeff();
  if (rp > eps || rd > eps) return false;
  for (Eigen::Index a = 0; a < na; ++a) {
    if (side[a] < 0 && sol[n + a] > 1e-9) return false;
    if (side[a] > 0 && sol[n + a] < -1e-9) return false;
  }
  x_out = std::move(x);
  y_out = std::move(y);
  return true;
}

}  // namespace

QpResult solve_qp(const QpProblem& qp, const QpSettings& settings,
                  const Eigen::VectorXd* x_warm, const Eigen::VectorXd* y_warm) {
  const Eigen::Index n = qp.num_vars();
  const Eigen::Index m = qp.num_constraints();
  if (qp.P.rows() != n || qp.P.cols() != n || qp.A.rows() != m ||
      (m > 0 && qp.A.cols() != n) || qp.upper.size() != m)
    throw std::invalid_argument("solve_qp: inconsistent dimensions");

  QpResult res;

  if (m == 0) {
    Eigen::MatrixXd Preg = qp.P;
    Preg.diagonal().array() += 1e-12;
    res.x = Eigen::LDLT<Eigen::MatrixXd>(Preg).solve(-qp.q);
    res.y.resize(0);
    res.status = QpStatus::optimal;
    res.dual_residual = (qp.P * res.x + qp.q).cwiseAbs().maxCoeff();
    res.objective = 0.5 * res.x.dot(qp.P * res.x) + qp.q.dot(res.x);
    return res;
  }

  // Scaled copies.
  Eigen::MatrixXd P = qp.P;
  Eigen::VectorXd q = qp.q;
  Eigen::MatrixXd A = qp.A;
  const Scaling sc = ruiz_equilibrate(P, q, A, settings.scaling_iterations);
  Eigen::VectorXd lo(m), hi(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    lo[i] = qp.lower[i] > -kInf ? sc.e[i] * qp.lower[i] : -kInf;
    hi[i] = qp.upper[i] < kInf ? sc.e[i] * qp.upper[i] : kInf;
  }

  const double rho = settings.rho, sigma = settings.sigma,
               alpha = settings.alpha;
  Eigen::MatrixXd M = P + rho * A.transpose() * A;
  M.diagonal().array() += sigma;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("solve_qp: KKT factorization failed");

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  if (x_warm && x_warm->size() == n) x = sc.d.cwiseInverse().cwiseProduct(*x_warm);
  if (y_warm && y_warm->size() == m)
    y = sc.c * sc.e.cwiseInverse().cwiseProduct(*y_warm);
  Eigen::VectorXd z = (A * x).cwiseMax(lo).cwiseMin(hi);

  auto unscaled_residuals = [&](const Eigen::VectorXd& xs,
                                const Eigen::VectorXd& ys,
                                const Eigen::VectorXd& zs) -> Residuals {
    const Eigen::VectorXd rp =
        sc.e.cwiseInverse().cwiseProduct(A * xs - zs);
    const Eigen::VectorXd rd = sc.d.cwiseInverse().cwiseProduct(
                                   P * xs + q + A.transpose() * ys) /
                               sc.c;
    return {rp.cwiseAbs().maxCoeff(), rd.cwiseAbs().maxCoeff()};
  };

  auto unscale = [&](QpResult& r, const Eigen::VectorXd& xs,
                     const Eigen::VectorXd& ys) {
    r.x = sc.d.cwiseProduct(xs);
    r.y = sc.e.cwiseProduct(ys) / sc.c;
  };

  int it = 0;
  bool converged = false;
  while (it < settings.max_iterations) {
    ++it;
    const Eigen::VectorXd rhs =
        sigma * x - q + A.transpose() * (rho * z - y);
    const Eigen::VectorXd x_new = llt.solve(rhs);
    const Eigen::VectorXd ax_new = A * x_new;
    const Eigen::VectorXd z_relaxed = alpha * ax_new + (1.0 - alpha) * z;
    const Eigen::VectorXd z_new =
        (z_relaxed + y / rho).cwiseMax(lo).cwiseMin(hi);
    y += rho * (z_relaxed - z_new);
    x = x_new;
    z = z_new;

    if (it % settings.check_interval == 0 || it == settings.max_iterations) {
      const Residuals r = unscaled_residuals(x, y, z);
      res.primal_residual = r.primal;
      res.dual_residual = r.dual;
      if (r.primal <= settings.eps && r.dual <= settings.eps) {
        converged = true;
        break;
      }
      if (settings.polish && r.primal <= 1e-5 && r.dual <= 1e-5) {
        QpResult cand;
        unscale(cand, x, y);
        Eigen::VectorXd xp, yp;
        if (polish(qp, cand.y, settings.eps, xp, yp)) {
          res.x = std::move(xp);
          res.y = std::move(yp);
          res.status = QpStatus::optimal;
          res.iterations = it;
          res.polished = true;
          const Eigen::VectorXd ax = qp.A * res.x;
          double rp = 0.0;
          for (Eigen::Index i = 0; i < m; ++i)
            rp = std::max({rp, qp.lower[i] - ax[i], ax[i] - qp.upper[i]});
          res.primal_residual = std::max(rp, 0.0);
          res.dual_residual = (qp.P * res.x + qp.q +
                               qp.A.transpose() * res.y)
                                  .cwiseAbs()
                                  .maxCoeff();
          res.objective =
              0.5 * res.x.dot(qp.P * res.x) + qp.q.dot(res.x);
          return res;
        }
      }
    }
  }

  unscale(res, x, y);
  res.status = converged ? QpStatus::optimal : QpStatus::max_iterations;
  res.iterations = it;
  res.objective = 0.5 * res.x.dot(qp.P * res.x) + qp.q.dot(res.x);
  return res;
}

}  // namespace platoon::mpc
