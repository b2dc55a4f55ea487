#include "platoon/gp_model.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "platoon/csv.hpp"
#include "platoon/gp_kernels.hpp"
#include "platoon/parallel.hpp"

namespace platoon::gp {

void Dataset::validate() const {
  if (inputs.rows() != targets.size())
    throw std::invalid_argument("dataset: inputs and targets length mismatch");
  if (targets.size() < 1) throw std::invalid_argument("dataset: empty");
  if (!inputs.allFinite() || !targets.allFinite())
    throw std::invalid_argument("dataset: non-finite entries");
}

double jittered_cholesky(const Eigen::MatrixXd& S, Eigen::MatrixXd& lower) {
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd M = S;
    if (jitter > 0.0) M.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() == Eigen::Success) {
      lower = llt.matrixL();
      return jitter;
    }
    if (jitter == 0.0)
      jitter = 1e-10;
    else if (jitter < 1e-4)
      jitter *= 10.0;
    else
      throw NumericalError(
          "covariance not positive definite after jitter escalation to 1e-4");
  }
}

GpModel::GpModel(Kernel kernel, double noise_variance, Dataset data)
    : kernel_(std::move(kernel)),
      noise_variance_(noise_variance),
      data_(std::move(data)) {
  kernel_.validate();
  data_.validate();
  if (noise_variance_ < 0.0)
    throw std::invalid_argument("gp: noise_variance must be >= 0");
  if (data_.dim() != kernel_.input_dim())
    throw std::invalid_argument("gp: kernel/data dimension mismatch");

  Eigen::MatrixXd S = kernel_matrix(kernel_, data_.inputs);
  S.diagonal().array() += noise_variance_;
  jitter_ = jittered_cholesky(S, chol_lower_);

  alpha_ = chol_lower_.triangularView<Eigen::Lower>().solve(data_.targets);
  const double quad = alpha_.squaredNorm();  // y' (K+s^2 I)^-1 y
  alpha_ = chol_lower_.transpose().triangularView<Eigen::Upper>().solve(alpha_);

  const double m = static_cast<double>(data_.size());
  lml_ = -0.5 * quad - chol_lower_.diagonal().array().log().sum() -
         0.5 * m * std::log(2.0 * std::numbers::pi);
}

GpModel::Prediction GpModel::predict(const Eigen::VectorXd& query) const {
  if (query.size() != kernel_.input_dim())
    throw std::invalid_argument("predict: query dimension mismatch");
  if (!query.allFinite())
    throw std::invalid_argument("predict: non-finite query");
  const Eigen::Index m = data_.size();
  Eigen::VectorXd kq(m);
  for (Eigen::Index i = 0; i < m; ++i)
    kq[i] = kernel_eval(kernel_, query, data_.inputs.row(i).transpose());
  const double mean = kq.dot(alpha_);
  const Eigen::VectorXd v =
      chol_lower_.triangularView<Eigen::Lower>().solve(kq);
  const double var = kernel_.signal_variance - v.squaredNorm();
  return {mean, var > 0.0 ? var : 0.0};
}

void GpModel::predict_batch(const Eigen::MatrixXd& queries,
                            Eigen::VectorXd& means,
                            Eigen::VectorXd& variances) const {
  const Eigen::Index n = queries.rows();
  means.resize(n);
  variances.resize(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    const Prediction p = predict(queries.row(i).transpose());
    means[i] = p.mean;
    variances[i] = p.variance;
  }
}

Eigen::VectorXd GpModel::mean_gradient(const Eigen::VectorXd& query) const {
  if (query.size() != kernel_.input_dim())
    throw std::invalid_argument("mean_gradient: query dimension mismatch");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(query.size());
  for (Eigen::Index i = 0; i < data_.size(); ++i)
    g += alpha_[i] *
         kernel_grad_x(kernel_, query, data_.inputs.row(i).transpose());
  return g;
}

LmlValue log_marginal_likelihood_with_grad(const Dataset& data,
                                           const Eigen::VectorXd& logp) {
  data.validate();
  const Eigen::Index d = data.dim();
  const Eigen::Index m = data.size();
  if (logp.size() != d + 2)
    throw std::invalid_argument("lml: expected d+2 log-parameters");

  Kernel k;
  k.signal_variance = std::exp(2.0 * logp[0]);
  k.length_scales = logp.segment(1, d).array().exp();
  const double sn2 = std::exp(2.0 * logp[d + 1]);

  Eigen::MatrixXd K = kernel_matrix(k, data.inputs);
  Eigen::MatrixXd S = K;
  S.diagonal().array() += sn2;
  Eigen::MatrixXd L;
  jittered_cholesky(S, L);

  Eigen::VectorXd alpha = L.triangularView<Eigen::Lower>().solve(data.targets);
  const double quad = alpha.squaredNorm();
  alpha = L.transpose().triangularView<Eigen::Upper>().solve(alpha);

  LmlValue out;
  out.value = -0.5 * quad - L.diagonal().array().log().sum() -
              0.5 * static_cast<double>(m) * std::log(2.0 * std::numbers::pi);

  // W = alpha alpha' - S^{-1}; dL/dtheta = 1/2 tr(W dS/dtheta)
  Eigen::MatrixXd Sinv = Eigen::MatrixXd::Identity(m, m);
  L.triangularView<Eigen::Lower>().solveInPlace(Sinv);
  L.transpose().triangularView<Eigen::Upper>().solveInPlace(Sinv);
  Eigen::MatrixXd W = alpha * alpha.transpose() - Sinv;

  out.grad.resize(d + 2);
  // d/d log sigma_f: dS = 2K
  out.grad[0] = (W.array() * K.array()).sum();
  // d/d log l_j: dS = K .* Dj with Dj the scaled squared distances.
  // Row partials are summed in a fixed order so results do not depend on the
  // thread count.
  for (Eigen::Index j = 0; j < d; ++j) {
    const double lj = k.length_scales[j];
    Eigen::VectorXd row_acc(m);
#pragma omp parallel for schedule(static)
    for (Eigen::Index r = 0; r < m; ++r) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < m; ++c) {
        const double diff = (data.inputs(r, j) - data.inputs(c, j)) / lj;
        acc += W(r, c) * K(r, c) * diff * diff;
      }
      row_acc[r] = acc;
    }
    out.grad[1 + j] = 0.5 * row_acc.sum();
  }
  // d/d log sigma_n: dS = 2 sn2 I
  out.grad[d + 1] = sn2 * W.trace();
  return out;
}

namespace {

void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    os << ' ' << io::format_double(v[i]);
}

}  // namespace

void GpModel::save(std::ostream& os) const {
  os << "platoon-gp-model v1\n";
  os << "input_dim " << kernel_.input_dim() << '\n';
  os << "signal_variance " << io::format_double(kernel_.signal_variance)
     << '\n';
  os << "length_scales " << kernel_.input_dim();
  write_vector(os, kernel_.length_scales);
  os << '\n';
  os << "noise_variance " << io::format_double(noise_variance_) << '\n';
  os << "data " << data_.size() << '\n';
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    for (Eigen::Index j = 0; j < data_.dim(); ++j) {
      if (j) os << ' ';
      os << io::format_double(data_.inputs(i, j));
    }
    os << ' ' << io::format_double(data_.targets[i]) << '\n';
  }
  os << "end\n";
}

GpModel GpModel::load(std::istream& is) {
  std::string header, version;
  is >> header >> version;
  if (header != "platoon-gp-model" || version != "v1")
    throw std::runtime_error("gp model file: unrecognized header");
  std::string tag;
  Eigen::Index dim = 0;
  is >> tag >> dim;
  if (tag != "input_dim" || dim < 1)
    throw std::runtime_error("gp model file: bad input_dim");
  Kernel k;
  is >> tag >> k.signal_variance;
  if (tag != "signal_variance")
    throw std::runtime_error("gp model file: bad signal_variance");
  Eigen::Index nls = 0;
  is >> tag >> nls;
  if (tag != "length_scales" || nls != dim)
    throw std::runtime_error("gp model file: bad length_scales");
  k.length_scales.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) is >> k.length_scales[i];
  double noise = 0.0;
  is >> tag >> noise;
  if (tag != "noise_variance")
    throw std::runtime_error("gp model file: bad noise_variance");
  Eigen::Index m = 0;
  is >> tag >> m;
  if (tag != "data" || m < 1) throw std::runtime_error("gp model file: bad data");
  Dataset d;
  d.inputs.resize(m, dim);
  d.targets.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) is >> d.inputs(i, j);
    is >> d.targets[i];
  }
  is >> tag;
  if (tag != "end" || !is)
    throw std::runtime_error("gp model file: truncated");
  return GpModel(std::move(k), noise, std::move(d));
}

void GpModel::save_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  save(os);
}

GpModel GpModel::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return load(is);
}

}  // namespace platoon::gp
