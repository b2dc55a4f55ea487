#include "platoon/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "platoon/csv.hpp"

namespace platoon::cli {

namespace {

struct Entry {
  std::string key;  // "section.name"
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v +
                      "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" +
                      v + "'");
  }
}

template <typename T>
Entry num_entry(std::string key, T RunConfig::* field) {
  Entry e;
  e.key = key;
  e.set = [key, field](RunConfig& c, const std::string& v) {
    if constexpr (std::is_same_v<T, double>)
      c.*field = parse_double(key, v);
    else if constexpr (std::is_same_v<T, int>)
      c.*field = static_cast<int>(parse_int(key, v));
    else
      c.*field = static_cast<std::uint64_t>(parse_int(key, v));
  };
  e.get = [field](const RunConfig& c) {
    if constexpr (std::is_same_v<T, double>)
      return io::format_double(c.*field);
    else
      return std::to_string(c.*field);
  };
  return e;
}

Entry str_entry(std::string key, std::string RunConfig::* field) {
  Entry e;
  e.key = key;
  e.set = [field](RunConfig& c, const std::string& v) { c.*field = v; };
  e.get = [field](const RunConfig& c) { return c.*field; };
  return e;
}

const std::vector<Entry>& schema() {
  static const std::vector<Entry> s = {
      num_entry("config_version", &RunConfig::config_version),
      str_entry("scenario.name", &RunConfig::scenario_name),
      num_entry("scenario.duration_s", &RunConfig::duration_s),
      num_entry("scenario.n_av", &RunConfig::n_av),
      num_entry("scenario.initial_gap_m", &RunConfig::initial_gap_m),
      str_entry("scenario.reference_mps", &RunConfig::reference_mps),
      num_entry("scenario.seed", &RunConfig::scenario_seed),
      num_entry("mpc.horizon", &RunConfig::horizon),
      num_entry("mpc.dt", &RunConfig::dt),
      num_entry("mpc.q1", &RunConfig::q1),
      num_entry("mpc.q2", &RunConfig::q2),
      num_entry("mpc.r", &RunConfig::r),
      num_entry("mpc.v_min", &RunConfig::v_min),
      num_entry("mpc.v_max", &RunConfig::v_max),
      num_entry("mpc.a_min", &RunConfig::a_min),
      num_entry("mpc.a_max", &RunConfig::a_max),
      num_entry("mpc.delta_m", &RunConfig::delta_m),
      num_entry("mpc.p_def", &RunConfig::p_def),
      num_entry("mpc.sqp_max_iterations", &RunConfig::sqp_max_iterations),
      num_entry("mpc.sqp_tolerance", &RunConfig::sqp_tolerance),
      num_entry("mpc.slack_penalty", &RunConfig::slack_penalty),
      num_entry("mpc.qp_eps", &RunConfig::qp_eps),
      num_entry("mpc.qp_max_iterations", &RunConfig::qp_max_iterations),
      num_entry("arx.c1", &RunConfig::c1),
      num_entry("arx.c2", &RunConfig::c2),
      num_entry("arx.c3", &RunConfig::c3),
      num_entry("arx.c4", &RunConfig::c4),
      num_entry("arx.b1", &RunConfig::b1),
      num_entry("arx.b2", &RunConfig::b2),
      num_entry("arx.b3", &RunConfig::b3),
      num_entry("arx.b4", &RunConfig::b4),
      num_entry("arx.sample_time", &RunConfig::sample_time),
      num_entry("truth.reaction_delay_steps", &RunConfig::reaction_delay_steps),
      num_entry("truth.reaction_gain", &RunConfig::reaction_gain),
      num_entry("truth.reaction_width", &RunConfig::reaction_width),
      num_entry("truth.ripple_amplitude", &RunConfig::ripple_amplitude),
      num_entry("truth.ripple_wavelength", &RunConfig::ripple_wavelength),
      num_entry("truth.accel_increment_limit",
                &RunConfig::accel_increment_limit),
      num_entry("truth.brake_increment_limit",
                &RunConfig::brake_increment_limit),
      num_entry("truth.noise_std", &RunConfig::noise_std),
      num_entry("truth.seed", &RunConfig::truth_seed),
      num_entry("truth.closed_loop_noise_std",
                &RunConfig::closed_loop_noise_std),
      str_entry("truth.plant_model", &RunConfig::plant_model),
      num_entry("data.train_logs", &RunConfig::train_logs),
      num_entry("data.test_logs", &RunConfig::test_logs),
      num_entry("data.log_duration_s", &RunConfig::log_duration_s),
      num_entry("data.profile_accel_limit", &RunConfig::profile_accel_limit),
      num_entry("gp.subsample_stride", &RunConfig::subsample_stride),
      num_entry("gp.max_points", &RunConfig::max_points),
      num_entry("gp.restarts", &RunConfig::restarts),
      num_entry("gp.fit_seed", &RunConfig::fit_seed),
      str_entry("io.output_dir", &RunConfig::output_dir),
  };
  return s;
}

const Entry* find_entry(const std::string& key) {
  for (const auto& e : schema())
    if (e.key == key) return &e;
  return nullptr;
}

}  // namespace

sim::Scenario RunConfig::scenario() const {
  sim::Scenario s;
  s.name = scenario_name;
  s.duration_s = duration_s;
  s.reference_schedule = parse_reference_schedule(reference_mps);
  s.initial_gap_m = initial_gap_m;
  s.n_av = n_av;
  s.seed = scenario_seed;
  return s;
}

mpc::MpcConfig RunConfig::mpc_config(mpc::Variant variant) const {
  mpc::MpcConfig c;
  c.horizon = horizon;
  c.dt = dt;
  c.q1 = q1;
  c.q2 = q2;
  c.r = r;
  c.v_min = v_min;
  c.v_max = v_max;
  c.a_min = a_min;
  c.a_max = a_max;
  c.policy = DistancePolicy(delta_m, p_def);
  c.variant = variant;
  c.sqp_max_iterations = sqp_max_iterations;
  c.sqp_tolerance = sqp_tolerance;
  c.slack_penalty = slack_penalty;
  c.qp.eps = qp_eps;
  c.qp.max_iterations = qp_max_iterations;
  return c;
}

hv::ArxCoefficients RunConfig::arx() const {
  hv::ArxCoefficients a;
  a.c = {c1, c2, c3, c4};
  a.b = {b1, b2, b3, b4};
  a.sample_time = sample_time;
  return a;
}

hv::TruthHvSpec RunConfig::truth_spec() const {
  hv::TruthHvSpec t;
  t.base = arx();
  t.reaction_delay_steps = reaction_delay_steps;
  t.reaction_gain = reaction_gain;
  t.reaction_width = reaction_width;
  t.ripple_amplitude = ripple_amplitude;
  t.ripple_wavelength = ripple_wavelength;
  t.accel_increment_limit = accel_increment_limit;
  t.brake_increment_limit = brake_increment_limit;
  t.noise_std = noise_std;
  t.seed = truth_seed;
  return t;
}

sim::PlantModel RunConfig::plant() const {
  if (plant_model == "generator") return sim::PlantModel::generator;
  if (plant_model == "arx_gp") return sim::PlantModel::arx_gp;
  throw ConfigError("config: truth.plant_model must be generator or arx_gp");
}

void RunConfig::validate() const {
  if (config_version != 1)
    throw ConfigError("config: unsupported config_version");
  try {
    scenario().validate();
    mpc_config(mpc::Variant::nominal).validate();
    arx().validate();
    truth_spec().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  plant();
  if (train_logs < 1 || test_logs < 1)
    throw ConfigError("config: data.train_logs and data.test_logs must be >= 1");
  if (!(log_duration_s > 1.0))
    throw ConfigError("config: data.log_duration_s must be > 1");
  if (subsample_stride < 1) throw ConfigError("config: gp.subsample_stride >= 1");
  if (max_points < 2) throw ConfigError("config: gp.max_points must be >= 2");
  if (restarts < 1) throw ConfigError("config: gp.restarts must be >= 1");
  if (std::abs(dt - sample_time) > 1e-12)
    throw ConfigError("config: mpc.dt must equal arx.sample_time");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!section.empty() && key.find('.') == std::string::npos)
      key = section + "." + key;
    const Entry* e = find_entry(key);
    if (!e)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    e->set(cfg, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const Entry* e = find_entry(key);
  if (!e) throw ConfigError("override: unknown key '" + key + "'");
  e->set(config, value);
  config.validate();
}

std::string manifest_text(const RunConfig& config) {
  std::ostringstream os;
  std::string section;
  for (const auto& e : schema()) {
    const auto dot = e.key.find('.');
    const std::string sec = dot == std::string::npos ? "" : e.key.substr(0, dot);
    const std::string name = dot == std::string::npos ? e.key
                                                      : e.key.substr(dot + 1);
    if (sec != section) {
      os << '[' << sec << "]\n";
      section = sec;
    }
    os << name << " = " << e.get(config) << '\n';
  }
  return os.str();
}

std::vector<std::pair<double, double>> parse_reference_schedule(
    const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::istringstream is(text);
  std::string seg;
  while (std::getline(is, seg, ';')) {
    seg = trim(seg);
    if (seg.empty()) continue;
    const auto colon = seg.find(':');
    if (colon == std::string::npos)
      throw ConfigError("reference schedule segment '" + seg +
                        "': expected start:value");
    out.emplace_back(parse_double("reference", trim(seg.substr(0, colon))),
                     parse_double("reference", trim(seg.substr(colon + 1))));
  }
  if (out.empty()) throw ConfigError("reference schedule: empty");
  return out;
}

}  // namespace platoon::cli
