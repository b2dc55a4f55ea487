#include "platoon/harness.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "platoon/csv.hpp"

namespace platoon::sim {

void Scenario::validate() const {
  if (!(duration_s > 0.0))
    throw std::invalid_argument("scenario: duration must be > 0");
  if (n_av < 2) throw std::invalid_argument("scenario: n_av must be >= 2");
  if (reference_schedule.empty())
    throw std::invalid_argument("scenario: empty reference schedule");
  for (std::size_t i = 1; i < reference_schedule.size(); ++i)
    if (reference_schedule[i].first <= reference_schedule[i - 1].first)
      throw std::invalid_argument(
          "scenario: reference segments must be ordered by start time");
  if (!(initial_gap_m > 0.0))
    throw std::invalid_argument("scenario: initial gap must be > 0");
}

double Scenario::reference_at(double t) const {
  double v = reference_schedule.front().second;
  for (const auto& [start, value] : reference_schedule)
    if (t >= start) v = value;
  return v;
}

namespace {

const char* status_token(mpc::SolveStatus s) {
  switch (s) {
    case mpc::SolveStatus::optimal:
      return "optimal";
    case mpc::SolveStatus::max_iterations:
      return "max-iter";
    default:
      return "infeasible-relaxed";
  }
}

mpc::SolveStatus status_from_token(const std::string& t) {
  if (t == "optimal") return mpc::SolveStatus::optimal;
  if (t == "max-iter") return mpc::SolveStatus::max_iterations;
  if (t == "infeasible-relaxed") return mpc::SolveStatus::infeasible_relaxed;
  throw std::runtime_error("sim csv: unknown solver status '" + t + "'");
}

// The simulated human; both plant flavors expose one velocity step.
class HvPlantStepper {
 public:
  HvPlantStepper(const Plant& plant, const hv::ArxCoefficients& coeffs,
                 double v_hv0, double v_av0)
      : mode_(plant.model), gp_(plant.gp_truth), coeffs_(coeffs) {
    if (mode_ == PlantModel::generator) {
      gen_.emplace(plant.truth, v_hv0, v_av0);
    } else {
      if (gp_ == nullptr)
        throw std::invalid_argument("plant: arx_gp mode requires a GP model");
      hist_ = hv::VelocityHistory::constant(v_hv0, v_av0);
    }
  }

  // hv_vel_k and av_vel_k are the realized velocities at the step being
  // completed; returns the HV velocity for the next step.
  double step(double hv_vel_k, double av_vel_k) {
    if (mode_ == PlantModel::generator) return gen_->step(av_vel_k);
    hist_.push(hv_vel_k, av_vel_k);
    const double nominal = hv::arx_step(coeffs_, hist_);
    const auto p = gp_->predict(Eigen::Vector2d(hist_.hv[0], hist_.av[0]));
    return nominal + p.mean;
  }

 private:
  PlantModel mode_;
  const gp::GpModel* gp_;
  hv::ArxCoefficients coeffs_;
  std::optional<hv::TruthHv> gen_;
  hv::VelocityHistory hist_;
};

}  // namespace

SimLog run(const Scenario& scenario, const mpc::MpcConfig& config,
           const hv::ArxCoefficients& coeffs, const gp::GpModel* gp_controller,
           const Plant& plant) {
  scenario.validate();
  config.validate();
  const int na = scenario.n_av;
  const int steps = static_cast<int>(std::llround(scenario.duration_s / config.dt));

  PlatoonState state;
  state.avs.resize(na);
  for (int j = 0; j < na; ++j)
    state.avs[j] = {-static_cast<double>(j) * scenario.initial_gap_m, 0.0};
  double hv_position = -static_cast<double>(na) * scenario.initial_gap_m;
  state.hv_velocity = 0.0;
  state.history = hv::VelocityHistory::constant(0.0, 0.0);
  state.hv_position_mean = hv_position;
  state.hv_position_variance = 0.0;

  mpc::MpcController controller(config, coeffs, gp_controller);
  HvPlantStepper hv_plant(plant, coeffs, 0.0, 0.0);

  SimLog log;
  log.n_av = na;
  log.rows.reserve(steps);

  for (int k = 0; k < steps; ++k) {
    const double t = k * config.dt;
    SimRow row;
    row.time = t;
    row.v_ref = scenario.reference_at(t);

    mpc::MpcSolution sol;
    try {
      sol = controller.solve(state, row.v_ref);
    } catch (const std::exception& e) {
      log.truncated = true;
      log.failure = e.what();
      break;
    }

    row.av_position.resize(na);
    row.av_velocity.resize(na);
    row.av_accel.resize(na);
    for (int j = 0; j < na; ++j) {
      row.av_position[j] = state.avs[j].position;
      row.av_velocity[j] = state.avs[j].velocity;
      row.av_accel[j] = sol.accelerations(j, 0);
    }
    row.hv_position = hv_position;
    row.hv_velocity = state.hv_velocity;
    row.hv_belief_mean = sol.hv_mean[1];
    row.hv_belief_variance = sol.hv_variance[1];
    row.tightened_bound = sol.tightened_bound[0];
    row.gaps.resize(na);
    for (int j = 1; j < na; ++j)
      row.gaps[j - 1] = state.avs[j - 1].position - state.avs[j].position;
    row.gaps[na - 1] = state.avs[na - 1].position - hv_position;
    row.solver_status = sol.status;
    row.solver_iterations = sol.qp_iterations;
    row.slack = sol.slack;
    log.rows.push_back(std::move(row));

    // Advance the plant: AV kinematics with the first-step inputs, then the
    // human; its position integrates the velocity it held during this step.
    const double hv_vel_k = state.hv_velocity;
    const double av_last_vel_k = state.avs[na - 1].velocity;
    for (int j = 0; j < na; ++j)
      state.avs[j] = av_step(state.avs[j], sol.accelerations(j, 0), config.dt);
    hv_position += config.dt * hv_vel_k;
    const double hv_vel_next = hv_plant.step(hv_vel_k, av_last_vel_k);
    state.history.push(hv_vel_k, av_last_vel_k);
    state.hv_velocity = hv_vel_next;
    state.hv_position_mean = hv_position;
    state.hv_position_variance = 0.0;
  }
  return log;
}

Metrics compute_metrics(const SimLog& log, const mpc::MpcConfig& config,
                        const Scenario& scenario) {
  (void)scenario;
  Metrics m;
  if (log.rows.empty()) return m;
  const int na = log.n_av;
  const std::size_t K = log.rows.size();

  double cost = 0.0;
  double track_acc = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const SimRow& row = log.rows[k];
    const double e1 = row.av_velocity[0] - row.v_ref;
    cost += config.q1 * e1 * e1;
    track_acc += e1 * e1;
    for (int j = 1; j < na; ++j) {
      const double e2 = row.av_velocity[j] - row.av_velocity[j - 1];
      cost += config.q2 * e2 * e2;
    }
    if (k + 1 < K)
      for (int j = 0; j < na; ++j)
        cost += config.r * row.av_accel[j] * row.av_accel[j];
  }
  m.total_cost = cost;
  m.tracking_rmse = std::sqrt(track_acc / static_cast<double>(K));

  double min_av_av = std::numeric_limits<double>::infinity();
  double min_av_hv = std::numeric_limits<double>::infinity();
  int violations = 0;
  const double tol = 1e-6;
  for (const SimRow& row : log.rows) {
    for (int j = 0; j + 1 < na; ++j) {
      min_av_av = std::min(min_av_av, row.gaps[j]);
      if (row.gaps[j] < config.policy.delta - tol) ++violations;
    }
    min_av_hv = std::min(min_av_hv, row.gaps[na - 1]);
    if (row.gaps[na - 1] < config.policy.delta - tol) ++violations;
  }
  m.min_av_av_gap = min_av_av;
  m.min_av_hv_gap = min_av_hv;
  m.constraint_violations = violations;
  return m;
}

CompareResult compare(const Scenario& scenario, const mpc::MpcConfig& config,
                      const hv::ArxCoefficients& coeffs,
                      const gp::GpModel& gp_model, const Plant& plant) {
  mpc::MpcConfig nom_cfg = config;
  nom_cfg.variant = mpc::Variant::nominal;
  mpc::MpcConfig gp_cfg = config;
  gp_cfg.variant = mpc::Variant::gp;

  auto fut = std::async(std::launch::async, [&] {
    return run(scenario, nom_cfg, coeffs, nullptr, plant);
  });
  CompareResult out;
  out.gp_log = run(scenario, gp_cfg, coeffs, &gp_model, plant);
  out.nominal_log = fut.get();
  out.nominal = compute_metrics(out.nominal_log, nom_cfg, scenario);
  out.gp = compute_metrics(out.gp_log, gp_cfg, scenario);
  return out;
}

void write_sim_csv(const std::string& path, const SimLog& log) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "time_s,v_ref_mps";
  for (int j = 1; j <= log.n_av; ++j)
    os << ",av" << j << "_pos_m,av" << j << "_vel_mps,av" << j << "_acc_mps2";
  os << ",hv_pos_m,hv_vel_mps,hv_belief_mean_m,hv_belief_var_m2,"
        "tightened_bound_m";
  for (int j = 1; j < log.n_av; ++j)
    os << ",gap_av" << j << "_av" << j + 1 << "_m";
  os << ",gap_av" << log.n_av << "_hv_m,solver_status,solver_iterations,"
        "slack_m\n";
  using io::format_double;
  for (const SimRow& r : log.rows) {
    os << format_double(r.time) << ',' << format_double(r.v_ref);
    for (int j = 0; j < log.n_av; ++j)
      os << ',' << format_double(r.av_position[j]) << ','
         << format_double(r.av_velocity[j]) << ','
         << format_double(r.av_accel[j]);
    os << ',' << format_double(r.hv_position) << ','
       << format_double(r.hv_velocity) << ',' << format_double(r.hv_belief_mean)
       << ',' << format_double(r.hv_belief_variance) << ','
       << format_double(r.tightened_bound);
    for (int j = 0; j < log.n_av; ++j) os << ',' << format_double(r.gaps[j]);
    os << ',' << status_token(r.solver_status) << ',' << r.solver_iterations
       << ',' << format_double(r.slack) << '\n';
  }
}

SimLog read_sim_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("sim csv: empty file");
  const auto header = io::split_csv_line(line);
  // Infer the platoon size from the header layout.
  int na = 0;
  for (const auto& col : header)
    if (col.rfind("av", 0) == 0 && col.find("_pos_m") != std::string::npos) ++na;
  if (na < 1) throw std::runtime_error("sim csv: no vehicle columns");

  SimLog log;
  log.n_av = na;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = io::split_csv_line(line);
    if (static_cast<int>(f.size()) != static_cast<int>(header.size()))
      throw std::runtime_error("sim csv: ragged row");
    SimRow r;
    std::size_t at = 0;
    auto num = [&f, &at]() { return std::stod(f.at(at++)); };
    r.time = num();
    r.v_ref = num();
    r.av_position.resize(na);
    r.av_velocity.resize(na);
    r.av_accel.resize(na);
    for (int j = 0; j < na; ++j) {
      r.av_position[j] = num();
      r.av_velocity[j] = num();
      r.av_accel[j] = num();
    }
    r.hv_position = num();
    r.hv_velocity = num();
    r.hv_belief_mean = num();
    r.hv_belief_variance = num();
    r.tightened_bound = num();
    r.gaps.resize(na);
    for (int j = 0; j < na; ++j) r.gaps[j] = num();
    r.solver_status = status_from_token(f.at(at++));
    r.solver_iterations = std::stoi(f.at(at++));
    r.slack = num();
    log.rows.push_back(std::move(r));
  }
  return log;
}

std::string metrics_text(const Metrics& m) {
  std::ostringstream os;
  os << "total_cost " << io::format_double(m.total_cost) << '\n'
     << "min_av_av_gap_m " << io::format_double(m.min_av_av_gap) << '\n'
     << "min_av_hv_gap_m " << io::format_double(m.min_av_hv_gap) << '\n'
     << "tracking_rmse_mps " << io::format_double(m.tracking_rmse) << '\n'
     << "constraint_violations " << m.constraint_violations << '\n';
  return os.str();
}

std::string metrics_json(const Metrics& m) {
  std::ostringstream os;
  os << "{\n"
     << "  \"total_cost\": " << io::format_double(m.total_cost) << ",\n"
     << "  \"min_av_av_gap_m\": " << io::format_double(m.min_av_av_gap)
     << ",\n"
     << "  \"min_av_hv_gap_m\": " << io::format_double(m.min_av_hv_gap)
     << ",\n"
     << "  \"tracking_rmse_mps\": " << io::format_double(m.tracking_rmse)
     << ",\n"
     << "  \"constraint_violations\": " << m.constraint_violations << "\n"
     << "}\n";
  return os.str();
}

}  // namespace platoon::sim
