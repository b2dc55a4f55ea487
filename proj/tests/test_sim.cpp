#include <doctest.h>

#include <sstream>

#include "platoon/harness.hpp"

using namespace platoon;
using namespace platoon::sim;

namespace {

gp::GpModel zero_gp() {
  gp::Kernel k;
  k.signal_variance = 1e-30;
  k.length_scales = Eigen::Vector2d(1.0, 1.0);
  gp::Dataset d;
  d.inputs.resize(3, 2);
  d.inputs << 0, 0, 10, 10, 20, 20;
  d.targets = Eigen::VectorXd::Zero(3);
  return gp::GpModel(k, 0.0, d);
}

Scenario short_scenario(double duration) {
  Scenario s;
  s.name = "short";
  s.duration_s = duration;
  s.reference_schedule = {{0.0, 15.0}};
  return s;
}

Plant pure_arx_plant() {
  Plant p;
  p.model = PlantModel::generator;
  p.truth.base = hv::ArxCoefficients::identified();
  p.truth.reaction_delay_steps = 0;
  p.truth.accel_increment_limit = 1e9;
  p.truth.brake_increment_limit = 1e9;
  p.truth.noise_std = 0.0;
  return p;
}

}  // namespace

TEST_CASE("a run has one row per sample time") {
  mpc::MpcConfig cfg;
  cfg.variant = mpc::Variant::nominal;
  const SimLog log = run(short_scenario(5.0), cfg,
                         hv::ArxCoefficients::identified(), nullptr,
                         pure_arx_plant());
  CHECK(log.rows.size() == 50);
  CHECK_FALSE(log.truncated);
}

TEST_CASE("reruns are bitwise identical") {
  mpc::MpcConfig cfg;
  cfg.variant = mpc::Variant::gp;
  const auto model = zero_gp();
  const auto go = [&] {
    return run(short_scenario(4.0), cfg, hv::ArxCoefficients::identified(),
               &model, pure_arx_plant());
  };
  const SimLog a = go();
  const SimLog b = go();
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].av_position == b.rows[k].av_position);
    CHECK(a.rows[k].av_velocity == b.rows[k].av_velocity);
    CHECK(a.rows[k].av_accel == b.rows[k].av_accel);
    CHECK(a.rows[k].hv_position == b.rows[k].hv_position);
    CHECK(a.rows[k].hv_velocity == b.rows[k].hv_velocity);
  }
}

TEST_CASE("logged HV positions integrate the logged velocities") {
  mpc::MpcConfig cfg;
  cfg.variant = mpc::Variant::nominal;
  const SimLog log = run(short_scenario(6.0), cfg,
                         hv::ArxCoefficients::identified(), nullptr,
                         pure_arx_plant());
  double pos = log.rows.front().hv_position;
  for (std::size_t k = 1; k < log.rows.size(); ++k) {
    pos += cfg.dt * log.rows[k - 1].hv_velocity;
    CHECK(log.rows[k].hv_position == doctest::Approx(pos).epsilon(1e-9));
  }
}

TEST_CASE("zero GP and zero-discrepancy truth make both variants identical") {
  mpc::MpcConfig cfg;
  const auto model = zero_gp();
  const CompareResult result =
      compare(short_scenario(5.0), cfg, hv::ArxCoefficients::identified(),
              model, pure_arx_plant());
  CHECK(result.nominal.total_cost ==
        doctest::Approx(result.gp.total_cost).epsilon(1e-6));
  CHECK(result.nominal.min_av_hv_gap ==
        doctest::Approx(result.gp.min_av_hv_gap).epsilon(1e-6));
  CHECK(result.nominal.min_av_av_gap ==
        doctest::Approx(result.gp.min_av_av_gap).epsilon(1e-6));
}

TEST_CASE("metrics of a hand-built log match manual arithmetic") {
  mpc::MpcConfig cfg;  // q1=q2=5, r=10
  SimLog log;
  log.n_av = 2;
  for (int k = 0; k < 3; ++k) {
    SimRow r;
    r.time = 0.1 * k;
    r.v_ref = 20.0;
    r.av_velocity = {20.0, 20.0};
    r.av_accel = {0.0, 0.0};
    r.av_position = {0.0, -20.0};
    r.gaps = {25.0, 30.0};
    log.rows.push_back(r);
  }
  // All at the reference with zero inputs: zero cost.
  Scenario sc = short_scenario(0.3);
  CHECK(compute_metrics(log, cfg, sc).total_cost == 0.0);

  // One unit leader velocity error in the first row only.
  log.rows[0].av_velocity = {21.0, 20.0};
  const Metrics m = compute_metrics(log, cfg, sc);
  // q1*(1)^2 + q2*(20-21)^2 = 5 + 5
  CHECK(m.total_cost == doctest::Approx(10.0).epsilon(1e-12));

  // Hand-built mixed case evaluated like a spreadsheet.
  log.rows[1].av_accel = {2.0, -1.0};
  log.rows[2].av_accel = {3.0, 0.0};  // last row inputs are not counted
  const Metrics m2 = compute_metrics(log, cfg, sc);
  CHECK(m2.total_cost ==
        doctest::Approx(10.0 + 10.0 * (4.0 + 1.0)).epsilon(1e-12));
  CHECK(m2.min_av_av_gap == 25.0);
  CHECK(m2.min_av_hv_gap == 30.0);
  CHECK(m2.constraint_violations == 0);
}

TEST_CASE("violations are counted against the untightened gap") {
  mpc::MpcConfig cfg;
  SimLog log;
  log.n_av = 2;
  SimRow r;
  r.v_ref = 20.0;
  r.av_velocity = {20.0, 20.0};
  r.av_accel = {0.0, 0.0};
  r.av_position = {0.0, -20.0};
  r.gaps = {20.0, 19.5};  // exactly delta and below delta
  log.rows.push_back(r);
  const Metrics m = compute_metrics(log, cfg, short_scenario(0.1));
  CHECK(m.constraint_violations == 1);
}

TEST_CASE("scenario reference schedule lookup") {
  Scenario s;
  s.duration_s = 30.0;
  s.reference_schedule = {{0.0, 20.0}, {15.0, 10.0}};
  s.validate();
  CHECK(s.reference_at(0.0) == 20.0);
  CHECK(s.reference_at(14.99) == 20.0);
  CHECK(s.reference_at(15.0) == 10.0);
  CHECK(s.reference_at(29.9) == 10.0);
}
