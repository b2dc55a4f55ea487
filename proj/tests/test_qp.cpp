#include <doctest.h>

#include <Eigen/Dense>
#include <limits>
#include <random>

#include "platoon/qp.hpp"

using namespace platoon::mpc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Brute-force oracle: enumerate every lower/upper/inactive assignment of the
// constraint rows, solve the equality-constrained problem, keep the best
// feasible KKT point. Only viable for a handful of constraints.
double enumeration_oracle(const QpProblem& qp) {
  const Eigen::Index n = qp.num_vars();
  const Eigen::Index m = qp.num_constraints();
  double best = kInf;
  std::vector<int> assign(m, 0);
  const long total = static_cast<long>(std::pow(3.0, double(m)));
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<Eigen::Index> act;
    std::vector<int> sides;
    for (Eigen::Index i = 0; i < m; ++i, c /= 3) {
      const int a = static_cast<int>(c % 3);
      assign[i] = a;
      if (a) {
        act.push_back(i);
        sides.push_back(a == 1 ? -1 : +1);
      }
    }
    const Eigen::Index na = static_cast<Eigen::Index>(act.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + na, n + na);
    K.topLeftCorner(n, n) = qp.P;
    Eigen::VectorXd rhs(n + na);
    rhs.head(n) = -qp.q;
    for (Eigen::Index a = 0; a < na; ++a) {
      K.block(0, n + a, n, 1) = qp.A.row(act[a]).transpose();
      K.block(n + a, 0, 1, n) = qp.A.row(act[a]);
      rhs[n + a] = sides[a] < 0 ? qp.lower[act[a]] : qp.upper[act[a]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    bool ok = true;
    const Eigen::VectorXd ax = qp.A * x;
    for (Eigen::Index i = 0; i < m && ok; ++i)
      if (ax[i] < qp.lower[i] - 1e-9 || ax[i] > qp.upper[i] + 1e-9) ok = false;
    for (Eigen::Index a = 0; a < na && ok; ++a) {
      const double nu = sol[n + a];
      if (sides[a] < 0 && nu > 1e-9) ok = false;
      if (sides[a] > 0 && nu < -1e-9) ok = false;
    }
    if (!ok) continue;
    best = std::min(best, 0.5 * x.dot(qp.P * x) + qp.q.dot(x));
  }
  return best;
}

QpProblem random_qp(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = g(rng);
  QpProblem qp;
  qp.P = B.transpose() * B + 0.5 * Eigen::MatrixXd::Identity(n, n);
  qp.q.resize(n);
  for (int i = 0; i < n; ++i) qp.q[i] = g(rng);
  qp.A.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) qp.A(i, j) = g(rng);
  // Bounds built around a known interior point so every draw is feasible.
  Eigen::VectorXd x0(n);
  for (int i = 0; i < n; ++i) x0[i] = g(rng);
  const Eigen::VectorXd ax0 = qp.A * x0;
  qp.lower.resize(m);
  qp.upper.resize(m);
  for (int i = 0; i < m; ++i) {
    qp.lower[i] = ax0[i] - 0.1 - std::abs(g(rng));
    qp.upper[i] = ax0[i] + 0.1 + std::abs(g(rng));
  }
  return qp;
}

}  // namespace

TEST_CASE("textbook active constraint") {
  QpProblem qp;
  qp.P = Eigen::MatrixXd::Constant(1, 1, 2.0);
  qp.q = Eigen::VectorXd::Zero(1);
  qp.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  qp.lower = Eigen::VectorXd::Constant(1, 1.0);
  qp.upper = Eigen::VectorXd::Constant(1, kInf);
  const QpResult r = solve_qp(qp);
  CHECK(r.status == QpStatus::optimal);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("unconstrained problems reduce to the normal equations") {
  std::mt19937_64 rng(5);
  const QpProblem base = random_qp(rng, 6, 0);
  const QpResult r = solve_qp(base);
  const Eigen::VectorXd direct = base.P.ldlt().solve(-base.q);
  CHECK((r.x - direct).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("random QPs match the active-set enumeration oracle") {
  std::mt19937_64 rng(99);
  int solved = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const QpProblem qp = random_qp(rng, 3, 5);
    const double oracle = enumeration_oracle(qp);
    if (!std::isfinite(oracle)) continue;  // infeasible draw
    const QpResult r = solve_qp(qp);
    REQUIRE(r.status == QpStatus::optimal);
    const double obj = 0.5 * r.x.dot(qp.P * r.x) + qp.q.dot(r.x);
    CHECK(obj == doctest::Approx(oracle).epsilon(1e-6).scale(1.0));
    ++solved;
  }
  CHECK(solved == 20);
}

TEST_CASE("residuals meet the configured tolerance") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    const QpProblem qp = random_qp(rng, 8, 12);
    const QpResult r = solve_qp(qp);
    REQUIRE(r.status == QpStatus::optimal);
    CHECK(r.primal_residual <= 1e-8);
    CHECK(r.dual_residual <= 1e-8);
  }
}

TEST_CASE("solves are bitwise reproducible") {
  std::mt19937_64 rng(321);
  const QpProblem qp = random_qp(rng, 5, 9);
  const QpResult a = solve_qp(qp);
  const QpResult b = solve_qp(qp);
  CHECK(a.iterations == b.iterations);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("box-only problems clip the unconstrained optimum") {
  QpProblem qp;
  qp.P = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  qp.q = Eigen::Vector2d(-10.0, 1.0);
  qp.A = Eigen::MatrixXd::Identity(2, 2);
  qp.lower = Eigen::Vector2d(-1.0, -1.0);
  qp.upper = Eigen::Vector2d(1.0, 1.0);
  const QpResult r = solve_qp(qp);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-8));
}
