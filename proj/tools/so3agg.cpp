#include <CLI11.hpp>
#include <iostream>

#include "so3agg/commands.hpp"
#include "so3agg/config.hpp"

namespace {

void add_common(CLI::App* cmd, so3agg::CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Config file (key = value, or a summary.json)");
  cmd->add_option("--preset", opts.preset, "Named parameter set")
      ->check(CLI::IsMember(so3agg::preset_names()));
  cmd->add_option("--set", opts.sets, "Override key=value (repeatable)")->take_all();
  cmd->add_option("--seed", opts.seed, "Random seed");
  cmd->add_option("--output-dir", opts.output_dir, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aggregation dynamics on SO(3)"};
  app.require_subcommand(1);

  so3agg::CommonOptions sim_opts;
  CLI::App* simulate = app.add_subcommand("simulate", "Run one simulation");
  add_common(simulate, sim_opts);

  so3agg::CommonOptions sweep_opts;
  std::string param;
  std::vector<std::string> values;
  double threshold = 0.01;
  CLI::App* sweep = app.add_subcommand("sweep", "Run one simulation per parameter value");
  add_common(sweep, sweep_opts);
  sweep->add_option("--param", param, "Parameter to vary, e.g. potential.q")->required();
  sweep->add_option("--values", values, "Values, space or comma separated")
      ->delimiter(',')
      ->expected(0, -1);
  sweep->add_option("--threshold", threshold, "Diameter threshold for time-to-threshold");

  std::string karcher_csv;
  CLI::App* karcher = app.add_subcommand("karcher", "Karcher mean of a final configuration");
  karcher->add_option("csv", karcher_csv, "trajectory.csv or state CSV")->required();

  so3agg::CommonOptions const_opts;
  double epsilon = 0.1;
  CLI::App* constants = app.add_subcommand("constants", "Stability constants as JSON");
  add_common(constants, const_opts);
  constants->add_option("--epsilon", epsilon, "Disk margin epsilon in (0, pi/4]");

  std::string w1_a;
  std::string w1_b;
  CLI::App* w1 = app.add_subcommand("w1", "1-Wasserstein distance between two states");
  w1->add_option("a", w1_a, "First state CSV")->required();
  w1->add_option("b", w1_b, "Second state CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : so3agg::kExitConfig;
  }

  if (*simulate) return so3agg::cmd_simulate(sim_opts, std::cout, std::cerr);
  if (*sweep) return so3agg::cmd_sweep(sweep_opts, param, values, threshold, std::cout, std::cerr);
  if (*karcher) return so3agg::cmd_karcher(karcher_csv, std::cout, std::cerr);
  if (*constants) return so3agg::cmd_constants(const_opts, epsilon, std::cout, std::cerr);
  return so3agg::cmd_w1(w1_a, w1_b, std::cout, std::cerr);
}
