#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "platoon/config.hpp"
#include "platoon/csv.hpp"
#include "platoon/harness.hpp"
#include "platoon/pipeline.hpp"
#include "platoon/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace platoon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMissingArtifact = 3;
constexpr int kExitControllerFailure = 4;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir_flag;
};

cli::RunConfig resolve_config(const CommonArgs& args) {
  cli::RunConfig cfg;
  if (!args.config_path.empty())
    cfg = cli::load_config_file(args.config_path);
  for (const auto& ov : args.overrides) cli::apply_override(cfg, ov);
  if (!args.output_dir_flag.empty()) cfg.output_dir = args.output_dir_flag;
  cfg.validate();
  return cfg;
}

fs::path output_root(const cli::RunConfig& cfg) {
  fs::path out(cfg.output_dir);
  if (const char* root = std::getenv("PLATOON_OUTPUT_ROOT");
      root && *root && !out.is_absolute())
    out = fs::path(root) / out;
  return out;
}

void write_manifest(const cli::RunConfig& cfg, const fs::path& dir) {
  io::write_file((dir / "manifest.cfg").string(), cli::manifest_text(cfg));
}

sim::Plant plant_from_config(const cli::RunConfig& cfg,
                             const gp::GpModel* gp_truth) {
  sim::Plant plant;
  plant.model = cfg.plant();
  plant.truth = cfg.truth_spec();
  plant.truth.noise_std = cfg.closed_loop_noise_std;
  plant.truth.seed = cfg.scenario_seed;
  plant.gp_truth = gp_truth;
  return plant;
}

int cmd_generate_data(const CommonArgs& args) {
  const cli::RunConfig cfg = resolve_config(args);
  const fs::path dir = output_root(cfg) / "data";
  fs::create_directories(dir);
  cli::generate_data(cfg, dir.string());
  write_manifest(cfg, dir);
  const auto paths = cli::data_paths(dir.string(), cfg);
  std::cout << "wrote " << paths.train.size() << " training logs and "
            << paths.test.size() << " test logs under " << dir.string()
            << "\n";
  return kExitOk;
}

int cmd_train(const CommonArgs& args) {
  const cli::RunConfig cfg = resolve_config(args);
  const fs::path data_dir = output_root(cfg) / "data";
  const auto paths = cli::data_paths(data_dir.string(), cfg);
  for (const auto& p : paths.train)
    if (!fs::exists(p)) {
      std::cerr << "missing training log " << p
                << " (run generate-data first)\n";
      return kExitMissingArtifact;
    }
  for (const auto& p : paths.test)
    if (!fs::exists(p)) {
      std::cerr << "missing test log " << p << "\n";
      return kExitMissingArtifact;
    }
  const fs::path model_dir = output_root(cfg) / "model";
  fs::create_directories(model_dir);

  cli::TrainReport report;
  const gp::GpModel model =
      cli::train_model(cfg, data_dir.string(), &report);
  model.save_file((model_dir / "gp_model.txt").string());
  io::write_file((model_dir / "train_report.txt").string(), report.text());
  io::write_file((model_dir / "train_report.json").string(), report.json());
  write_manifest(cfg, model_dir);
  std::cout << report.text();
  return kExitOk;
}

int run_and_emit(const cli::RunConfig& cfg, mpc::Variant variant,
                 const gp::GpModel* model, const fs::path& sim_dir) {
  const sim::Scenario scenario = cfg.scenario();
  const sim::Plant plant = plant_from_config(cfg, model);
  const sim::SimLog log = sim::run(scenario, cfg.mpc_config(variant),
                                   cfg.arx(), model, plant);
  const std::string tag =
      scenario.name + (variant == mpc::Variant::gp ? "_gp" : "_nominal");
  sim::write_sim_csv((sim_dir / (tag + ".csv")).string(), log);
  const sim::Metrics metrics =
      sim::compute_metrics(log, cfg.mpc_config(variant), scenario);
  io::write_file((sim_dir / (tag + "_metrics.txt")).string(),
                 sim::metrics_text(metrics));
  io::write_file((sim_dir / (tag + "_metrics.json")).string(),
                 sim::metrics_json(metrics));
  io::write_file((sim_dir / (tag + "_plot.svg")).string(),
                 io::render_sim_svg(log, cfg.delta_m));
  if (log.truncated) {
    std::cerr << "controller failure at t="
              << (log.rows.empty() ? 0.0 : log.rows.back().time)
              << ": " << log.failure << "\n";
    return kExitControllerFailure;
  }
  std::cout << tag << ": cost=" << metrics.total_cost
            << " min_av_hv_gap=" << metrics.min_av_hv_gap
            << " violations=" << metrics.constraint_violations << "\n";
  return kExitOk;
}

int cmd_simulate(const CommonArgs& args, const std::string& variant_name) {
  const cli::RunConfig cfg = resolve_config(args);
  const mpc::Variant variant =
      variant_name == "nominal" ? mpc::Variant::nominal : mpc::Variant::gp;
  const fs::path sim_dir = output_root(cfg) / "sim";
  fs::create_directories(sim_dir);

  std::optional<gp::GpModel> model;
  if (variant == mpc::Variant::gp || cfg.plant() == sim::PlantModel::arx_gp) {
    const fs::path model_path = output_root(cfg) / "model" / "gp_model.txt";
    if (!fs::exists(model_path)) {
      std::cerr << "missing model file " << model_path
                << " (run train first)\n";
      return kExitMissingArtifact;
    }
    model = gp::GpModel::load_file(model_path.string());
  }
  const int rc = run_and_emit(cfg, variant, model ? &*model : nullptr, sim_dir);
  write_manifest(cfg, sim_dir);
  return rc;
}

int cmd_compare(const CommonArgs& args) {
  const cli::RunConfig cfg = resolve_config(args);
  const fs::path model_path = output_root(cfg) / "model" / "gp_model.txt";
  if (!fs::exists(model_path)) {
    std::cerr << "missing model file " << model_path << " (run train first)\n";
    return kExitMissingArtifact;
  }
  const gp::GpModel model = gp::GpModel::load_file(model_path.string());
  const fs::path sim_dir = output_root(cfg) / "sim";
  fs::create_directories(sim_dir);

  const sim::Scenario scenario = cfg.scenario();
  const sim::Plant plant = plant_from_config(cfg, &model);
  const sim::CompareResult result = sim::compare(
      scenario, cfg.mpc_config(mpc::Variant::gp), cfg.arx(), model, plant);

  const std::string base = scenario.name;
  sim::write_sim_csv((sim_dir / (base + "_nominal.csv")).string(),
                     result.nominal_log);
  sim::write_sim_csv((sim_dir / (base + "_gp.csv")).string(), result.gp_log);
  io::write_file((sim_dir / (base + "_nominal_plot.svg")).string(),
                 io::render_sim_svg(result.nominal_log, cfg.delta_m));
  io::write_file((sim_dir / (base + "_gp_plot.svg")).string(),
                 io::render_sim_svg(result.gp_log, cfg.delta_m));

  std::ostringstream table;
  table << "scenario " << scenario.name << "\n";
  table << "controller cost min_distance_m\n";
  table << "nominal " << io::format_double(result.nominal.total_cost) << ' '
        << io::format_double(result.nominal.min_av_hv_gap) << "\n";
  table << "gp " << io::format_double(result.gp.total_cost) << ' '
        << io::format_double(result.gp.min_av_hv_gap) << "\n";
  io::write_file((sim_dir / (base + "_compare.txt")).string(), table.str());

  std::ostringstream js;
  js << "{\n  \"scenario\": \"" << scenario.name << "\",\n  \"nominal\": "
     << sim::metrics_json(result.nominal) << ",\n  \"gp\": "
     << sim::metrics_json(result.gp) << "}\n";
  io::write_file((sim_dir / (base + "_compare.json")).string(), js.str());
  write_manifest(cfg, sim_dir);
  std::cout << table.str();
  if (result.nominal_log.truncated || result.gp_log.truncated)
    return kExitControllerFailure;
  return kExitOk;
}

int cmd_plot(const CommonArgs& args, const std::string& input,
             const std::string& output) {
  const cli::RunConfig cfg = resolve_config(args);
  if (!fs::exists(input)) {
    std::cerr << "missing simulation log " << input << "\n";
    return kExitMissingArtifact;
  }
  const sim::SimLog log = sim::read_sim_csv(input);
  io::write_file(output, io::render_sim_svg(log, cfg.delta_m));
  std::cout << "wrote " << output << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Gaussian-process learning-based MPC for a mixed vehicle platoon"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("-c,--config", common.config_path, "configuration file");
  app.add_option("-s,--set", common.overrides,
                 "override a config key (section.key=value)");
  app.add_option("-o,--output-dir", common.output_dir_flag,
                 "override io.output_dir");

  auto* gen = app.add_subcommand("generate-data",
                                 "write synthetic driving logs");
  auto* train = app.add_subcommand("train",
                                   "fit the discrepancy GP and report RMSEs");
  auto* simulate =
      app.add_subcommand("simulate", "closed-loop run of one controller");
  std::string variant = "gp";
  simulate->add_option("--variant", variant, "nominal or gp")
      ->check(CLI::IsMember({"nominal", "gp"}));
  auto* comp = app.add_subcommand("compare",
                                  "run both controllers on the same plant");
  auto* plot = app.add_subcommand("plot", "re-render a simulation log as SVG");
  std::string plot_in, plot_out = "plot.svg";
  plot->add_option("--input", plot_in, "simulation CSV")->required();
  plot->add_option("--output", plot_out, "SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_generate_data(common);
    if (train->parsed()) return cmd_train(common);
    if (simulate->parsed()) return cmd_simulate(common, variant);
    if (comp->parsed()) return cmd_compare(common);
    if (plot->parsed()) return cmd_plot(common, plot_in, plot_out);
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
