#include "platoon/gp_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "platoon/parallel.hpp"

namespace platoon::gp {

namespace {

constexpr double kNoiseVarianceFloor = 1e-8;

struct RestartResult {
  double lml = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd logp;
  bool ok = false;
};

double safe_eval(const Dataset& data, const Eigen::VectorXd& logp,
                 Eigen::VectorXd& grad) {
  try {
    LmlValue v = log_marginal_likelihood_with_grad(data, logp);
    if (!std::isfinite(v.value)) return -std::numeric_limits<double>::infinity();
    grad = v.grad;
    return v.value;
  } catch (const NumericalError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

// Gradient ascent with Armijo backtracking on the normalized direction.
RestartResult ascend(const Dataset& data, Eigen::VectorXd logp,
                     const FitOptions& opt) {
  const Eigen::Index d = data.dim();
  const double log_noise_floor = 0.5 * std::log(kNoiseVarianceFloor);
  const bool fix_noise = opt.fixed_noise_variance.has_value();

  auto clamp = [&](Eigen::VectorXd& p) {
    if (!fix_noise) p[d + 1] = std::max(p[d + 1], log_noise_floor);
    for (Eigen::Index i = 0; i < p.size(); ++i)
      p[i] = std::clamp(p[i], -12.0, 12.0);
  };
  clamp(logp);

  Eigen::VectorXd grad;
  double f = safe_eval(data, logp, grad);
  RestartResult res;
  if (!std::isfinite(f)) return res;
  if (fix_noise) grad[d + 1] = 0.0;

  double step = 0.5;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double gnorm = grad.norm();
    if (gnorm < opt.grad_tolerance) break;
    Eigen::VectorXd dir = grad / std::max(gnorm, 1.0);
    bool accepted = false;
    while (step > 1e-13) {
      Eigen::VectorXd trial = logp + step * dir;
      clamp(trial);
      if (fix_noise) trial[d + 1] = logp[d + 1];
      Eigen::VectorXd tg;
      const double ft = safe_eval(data, trial, tg);
      if (ft > f + 1e-4 * step * gnorm) {
        logp = trial;
        f = ft;
        grad = tg;
        if (fix_noise) grad[d + 1] = 0.0;
        step = std::min(step * 1.6, 2.0);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  res.lml = f;
  res.logp = logp;
  res.ok = std::isfinite(f);
  return res;
}

Eigen::VectorXd initial_draw(std::mt19937_64& rng, Eigen::Index d,
                             const FitOptions& opt) {
  std::uniform_real_distribution<double> u(std::log(opt.init_low),
                                           std::log(opt.init_high));
  Eigen::VectorXd logp(d + 2);
  for (Eigen::Index i = 0; i < d + 2; ++i) logp[i] = u(rng);
  return logp;
}

}  // namespace

FitOutcome fit_detailed(const Dataset& data, const FitOptions& options) {
  data.validate();
  if (data.size() < 2) throw FitError("fit: need at least 2 data points");
  if (options.restarts < 1) throw FitError("fit: restarts must be >= 1");

  const Eigen::Index d = data.dim();

  // The initial draws assume targets of order one; fit in standardized
  // target space and scale the variances back afterwards (the posterior is
  // identical under this reparameterization).
  const double target_scale = std::max(
      std::sqrt(data.targets.squaredNorm() / double(data.size())), 1e-12);
  Dataset scaled = data;
  scaled.targets /= target_scale;

  // Degenerate geometry: identical inputs leave the kernel matrix rank one;
  // only a positive noise term can make it solvable.
  bool all_identical = true;
  for (Eigen::Index i = 1; i < data.size() && all_identical; ++i)
    if ((data.inputs.row(i) - data.inputs.row(0)).cwiseAbs().maxCoeff() != 0.0)
      all_identical = false;
  if (all_identical && options.fixed_noise_variance.has_value() &&
      *options.fixed_noise_variance == 0.0)
    throw FitError(
        "fit: degenerate dataset (all inputs identical) with noise fixed at "
        "zero");

  // Per-restart seeds derived up front so restarts can run in any order.
  FitOptions opt = options;
  if (opt.fixed_noise_variance.has_value())
    opt.fixed_noise_variance =
        *opt.fixed_noise_variance / (target_scale * target_scale);
  std::vector<Eigen::VectorXd> inits(opt.restarts);
  for (int r = 0; r < opt.restarts; ++r) {
    std::mt19937_64 rng(opt.seed + 0x9e3779b97f4a7c15ull * (r + 1));
    inits[r] = initial_draw(rng, d, opt);
    if (opt.fixed_noise_variance.has_value()) {
      const double fv = *opt.fixed_noise_variance;
      inits[r][d + 1] = 0.5 * std::log(std::max(fv, kNoiseVarianceFloor));
    }
  }

  std::vector<RestartResult> results(opt.restarts);
#pragma omp parallel for schedule(dynamic) if (opt.parallel_restarts)
  for (int r = 0; r < opt.restarts; ++r)
    results[r] = ascend(scaled, inits[r], opt);

  int best = -1;
  for (int r = 0; r < opt.restarts; ++r) {
    if (!results[r].ok) continue;
    if (best < 0 || results[r].lml > results[best].lml) best = r;
  }
  if (best < 0) throw FitError("fit: every restart failed numerically");

  const Eigen::VectorXd& lp = results[best].logp;
  const double s2 = target_scale * target_scale;
  Kernel k;
  k.signal_variance = s2 * std::exp(2.0 * lp[0]);
  k.length_scales = lp.segment(1, d).array().exp();
  double noise = options.fixed_noise_variance.value_or(
      s2 * std::max(std::exp(2.0 * lp[d + 1]), kNoiseVarianceFloor));

  FitOutcome out{GpModel(std::move(k), noise, data), best, {}};
  out.restart_lml.resize(opt.restarts);
  for (int r = 0; r < opt.restarts; ++r) out.restart_lml[r] = results[r].lml;
  return out;
}

GpModel fit(const Dataset& data, const FitOptions& options) {
  return fit_detailed(data, options).model;
}

}  // namespace platoon::gp
