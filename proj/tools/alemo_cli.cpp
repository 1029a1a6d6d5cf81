// Experiment harness CLI: `run` executes seeded multi-trial optimizations,
// `compare` ranks finished run directories, `simulate` runs one reservoir
// schedule and exports field snapshots.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "alemo/alemo.hpp"

namespace {

int cmd_run(alemo::ExperimentConfig cfg, const std::string& config_path) {
  using nlohmann::json;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
    json j;
    in >> j;
    // The config file takes precedence over flags.
    if (j.contains("problem")) cfg.problem = j["problem"].get<std::string>();
    if (j.contains("dim")) cfg.dim = j["dim"].get<std::size_t>();
    if (j.contains("objectives")) cfg.objectives = j["objectives"].get<std::size_t>();
    if (j.contains("algo")) cfg.algo = j["algo"].get<std::string>();
    if (j.contains("budget")) cfg.budget = j["budget"].get<std::size_t>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<std::size_t>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("scenario")) cfg.scenario_path = j["scenario"].get<std::string>();
    if (j.contains("classical_zdt4")) cfg.classical_zdt4 = j["classical_zdt4"].get<bool>();
    if (j.contains("np")) cfg.optimizer.np = j["np"].get<std::size_t>();
    if (j.contains("tau")) cfg.optimizer.tau = j["tau"].get<std::size_t>();
    if (j.contains("offspring_pool"))
      cfg.optimizer.offspring_pool = j["offspring_pool"].get<std::size_t>();
    if (j.contains("initial_size")) cfg.optimizer.initial_size = j["initial_size"].get<std::size_t>();
    if (j.contains("inner_pop")) cfg.optimizer.inner_pop = j["inner_pop"].get<std::size_t>();
    if (j.contains("inner_generations"))
      cfg.optimizer.inner_generations = j["inner_generations"].get<std::size_t>();
    if (j.contains("mu")) cfg.optimizer.variation.mu = j["mu"].get<double>();
    if (j.contains("cr")) cfg.optimizer.variation.cr = j["cr"].get<double>();
    if (j.contains("eta_m")) cfg.optimizer.variation.eta_m = j["eta_m"].get<double>();
    if (j.contains("pm")) cfg.optimizer.variation.pm = j["pm"].get<double>();
  }

  const alemo::ExperimentResult result = alemo::run_experiment(cfg);
  std::size_t failed = 0;
  for (const auto& t : result.trials)
    if (!t.ok) {
      ++failed;
      std::cerr << "trial " << t.trial << " failed: " << t.error << "\n";
    }
  std::cout << cfg.algo << " on " << cfg.problem << ": " << (cfg.trials - failed) << "/"
            << cfg.trials << " trials ok";
  if (!result.final_hv.empty())
    std::cout << ", median final HV = " << alemo::format_double(alemo::vec_median(result.final_hv));
  if (!result.final_igd.empty())
    std::cout << ", median final IGD = "
              << alemo::format_double(alemo::vec_median(result.final_igd));
  std::cout << " (" << alemo::format_double(result.wall_seconds) << " s) -> "
            << result.out_dir.string() << "\n";
  return result.all_failed ? 2 : 0;
}

int cmd_compare(const std::vector<std::string>& dirs) {
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  const alemo::ComparisonReport report = alemo::compare_runs(paths);
  std::cout << alemo::format_report(report);
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir, double rate,
                 const std::string& rates_file, std::size_t snapshot_every) {
  const alemo::GeothermalScenario scenario = alemo::load_scenario(scenario_path);
  const alemo::ReservoirModel model(scenario.reservoir, scenario.dfn, scenario.step_days);
  const std::size_t n_inj = model.injector_cells().size();

  alemo::WellSchedule schedule;
  schedule.n_injectors = n_inj;
  schedule.n_steps = scenario.n_steps;
  schedule.step_days = scenario.step_days;
  if (!rates_file.empty()) {
    std::ifstream in(rates_file);
    if (!in) throw std::invalid_argument("cannot open rates file: " + rates_file);
    double v;
    while (in >> v) {
      schedule.rates.push_back(v);
      if (in.peek() == ',') in.ignore();
    }
    if (schedule.rates.size() != n_inj * scenario.n_steps)
      throw std::invalid_argument("rates file must hold exactly " +
                                  std::to_string(n_inj * scenario.n_steps) + " values");
  } else {
    if (rate < 0) rate = 0.5 * scenario.reservoir.rate_max;
    schedule.rates.assign(n_inj * scenario.n_steps, rate);
  }

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  alemo::ReservoirModel::StepCallback on_step;
  if (snapshot_every > 0) {
    on_step = [&](std::size_t step, const alemo::ReservoirState& state,
                  const alemo::PressureSolution& sol) {
      if ((step + 1) % snapshot_every != 0) return;
      std::ostringstream name;
      name << "snapshot_";
      name.width(3);
      name.fill('0');
      name << step << ".vtk";
      model.write_snapshot((out / name.str()).string(), state, &sol);
    };
  }
  const alemo::SimulationSeries series = model.simulate(schedule, on_step);

  std::string csv =
      "step,t_start_days,t_end_days,producer_temp_K,wir_m3s,wpr_m3s,tepr_W,energy_residual,"
      "substeps\n";
  for (const alemo::StepRecord& rec : series.steps) {
    csv += std::to_string(rec.step);
    csv += "," + alemo::format_double(rec.t_start_days);
    csv += "," + alemo::format_double(rec.t_end_days);
    csv += "," + alemo::format_double(rec.producer_temp);
    csv += "," + alemo::format_double(rec.wir);
    csv += "," + alemo::format_double(rec.wpr);
    csv += "," + alemo::format_double(rec.tepr_watts);
    csv += "," + alemo::format_double(rec.energy_residual);
    csv += "," + std::to_string(rec.substeps);
    csv += "\n";
  }
  alemo::write_text_atomic(out / "series.csv", csv);

  const double horizon = static_cast<double>(scenario.n_steps) * scenario.step_days;
  const double npv_long = alemo::npv(series, scenario.economics, 0.0, horizon);
  const double npv_short =
      alemo::npv(series, scenario.economics, 0.0, scenario.economics.short_horizon_days);
  std::cout << "simulated " << scenario.n_steps << " steps of " << scenario.step_days
            << " days; final producer T = "
            << alemo::format_double(series.steps.back().producer_temp)
            << " K, NPV_long = " << alemo::format_double(npv_long)
            << ", NPV_short = " << alemo::format_double(npv_short) << " -> " << out.string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surrogate-assisted multi-objective optimization harness"};
  app.require_subcommand(1);

  alemo::ExperimentConfig cfg;
  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run a seeded multi-trial experiment");
  run->add_option("--problem", cfg.problem, "benchmark name (zdt*/dtlz*) or 'geothermal'");
  run->add_option("--dim", cfg.dim, "decision-space dimension (benchmarks)");
  run->add_option("--objectives", cfg.objectives, "objective count (2 or 3, DTLZ only)");
  run->add_option("--algo", cfg.algo, "alemo or nsga2");
  run->add_option("--budget", cfg.budget, "true-evaluation budget per trial");
  run->add_option("--trials", cfg.trials, "number of independent trials");
  run->add_option("--seed", cfg.seed, "base seed; trial seeds are derived");
  run->add_option("--workers", cfg.workers, "parallel trial workers (0 = auto)");
  run->add_option("--out", cfg.out_dir, "output directory");
  run->add_option("--scenario", cfg.scenario_path, "geothermal scenario file");
  run->add_option("--config", config_path, "JSON config file overriding any flag");
  run->add_flag("--classical-zdt4", cfg.classical_zdt4, "use [-5,5] bounds for zdt4 tails");
  run->add_option("--np", cfg.optimizer.np, "population size");

  std::vector<std::string> compare_dirs;
  CLI::App* compare = app.add_subcommand("compare", "compare finished run directories");
  compare->add_option("dirs", compare_dirs, "run output directories")->required()->expected(-1);

  std::string sim_scenario, sim_out = "runs/simulate", sim_rates_file;
  double sim_rate = -1;
  std::size_t sim_snapshot_every = 0;
  CLI::App* simulate = app.add_subcommand("simulate", "run one reservoir schedule");
  simulate->add_option("--scenario", sim_scenario, "scenario file")->required();
  simulate->add_option("--out", sim_out, "output directory");
  simulate->add_option("--rate", sim_rate, "constant rate for all injectors, m^3/s");
  simulate->add_option("--rates-file", sim_rates_file,
                       "file of n_injectors x n_steps rates (injector-major)");
  simulate->add_option("--snapshot-every", sim_snapshot_every,
                       "write a VTK snapshot every k steps (0 = never)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(cfg, config_path);
    if (compare->parsed()) return cmd_compare(compare_dirs);
    return cmd_simulate(sim_scenario, sim_out, sim_rate, sim_rates_file, sim_snapshot_every);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
