#include "platoon/hv_model.hpp"

#include <cmath>
#include <stdexcept>

namespace platoon::hv {

ArxCoefficients ArxCoefficients::identified() {
  ArxCoefficients a;
  a.c = {-3.0227, 3.3543, -1.6329, 0.3014};
  a.b = {0.0063, -0.0303, 0.0495, -0.0254};
  a.sample_time = 0.1;
  return a;
}

double ArxCoefficients::dc_gain() const {
  const double sc = c[0] + c[1] + c[2] + c[3];
  const double sb = b[0] + b[1] + b[2] + b[3];
  return sb / (1.0 + sc);
}

void ArxCoefficients::validate() const {
  const double denom = 1.0 + c[0] + c[1] + c[2] + c[3];
  if (denom == 0.0)
    throw std::invalid_argument("arx: 1 + sum(c) must be nonzero");
  if (!(sample_time > 0.0))
    throw std::invalid_argument("arx: sample_time must be > 0");
}

double arx_step(const ArxCoefficients& coeffs, const VelocityHistory& hist) {
  double v = 0.0;
  for (int i = 0; i < 4; ++i)
    v += -coeffs.c[i] * hist.hv[i] + coeffs.b[i] * hist.av[i];
  return v;
}

CorrectedStep corrected_step(const ArxCoefficients& coeffs,
                             const gp::GpModel& gp,
                             const VelocityHistory& hist) {
  if (gp.kernel().input_dim() != 2)
    throw std::invalid_argument("corrected_step: GP input dimension must be 2");
  Eigen::Vector2d q(hist.hv[0], hist.av[0]);
  const auto p = gp.predict(q);
  return {arx_step(coeffs, hist) + p.mean, p.variance};
}

gp::Dataset build_discrepancy_dataset(std::span<const VelocitySample> log,
                                      const ArxCoefficients& coeffs) {
  if (log.size() < 6)
    throw std::invalid_argument(
        "build_discrepancy_dataset: log must have at least 6 samples");
  const std::size_t n = log.size() - 5;
  gp::Dataset out;
  out.inputs.resize(static_cast<Eigen::Index>(n), 2);
  out.targets.resize(static_cast<Eigen::Index>(n));
  for (std::size_t j = 5; j < log.size(); ++j) {
    VelocityHistory h;
    for (int i = 0; i < 4; ++i) {
      h.hv[i] = log[j - 1 - i].v_hv;
      h.av[i] = log[j - 1 - i].v_av;
    }
    const Eigen::Index row = static_cast<Eigen::Index>(j - 5);
    out.inputs(row, 0) = log[j - 1].v_hv;
    out.inputs(row, 1) = log[j - 1].v_av;
    out.targets[row] = log[j].v_hv - arx_step(coeffs, h);
  }
  return out;
}

gp::Dataset subsample(const gp::Dataset& data, int stride) {
  if (stride < 1) throw std::invalid_argument("subsample: stride must be >= 1");
  const Eigen::Index n = (data.size() + stride - 1) / stride;
  gp::Dataset out;
  out.inputs.resize(n, data.dim());
  out.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.inputs.row(i) = data.inputs.row(i * stride);
    out.targets[i] = data.targets[i * stride];
  }
  return out;
}

gp::Dataset evenly_downselect(const gp::Dataset& data, int max_points) {
  if (max_points < 1)
    throw std::invalid_argument("evenly_downselect: max_points must be >= 1");
  if (data.size() <= max_points) return data;
  gp::Dataset out;
  out.inputs.resize(max_points, data.dim());
  out.targets.resize(max_points);
  for (int i = 0; i < max_points; ++i) {
    // Evenly spaced indices including both endpoints.
    const Eigen::Index idx =
        (max_points == 1)
            ? 0
            : static_cast<Eigen::Index>(
                  std::llround(static_cast<double>(i) *
                               static_cast<double>(data.size() - 1) /
                               static_cast<double>(max_points - 1)));
    out.inputs.row(i) = data.inputs.row(idx);
    out.targets[i] = data.targets[idx];
  }
  return out;
}

gp::Dataset concat(const std::vector<gp::Dataset>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no datasets");
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.size();
  gp::Dataset out;
  out.inputs.resize(total, parts[0].dim());
  out.targets.resize(total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.inputs.middleRows(at, p.size()) = p.inputs;
    out.targets.segment(at, p.size()) = p.targets;
    at += p.size();
  }
  return out;
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size() || predicted.empty())
    throw std::invalid_argument("rmse: sequences must have equal length >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(predicted.size()));
}

}  // namespace platoon::hv
