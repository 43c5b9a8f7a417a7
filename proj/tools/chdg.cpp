// chdg -- command line driver: simulate <config>, verify <suite>,
// sweep <config> --axis k --values v1,v2,..., inspect <snapshot>.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "chdg/errors.hpp"
#include "chdg/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw chdg::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singular-diffusion Cahn-Hilliard solver and verification harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite, axis, values_csv, snapshot_path;
  bool strict = false;
  long long seed = -1;

  auto* sim = app.add_subcommand("simulate", "integrate a configured run");
  sim->add_option("config", config_path, "config file")->required();
  sim->add_option("--out", out_dir, "output directory (overrides run.out)");
  sim->add_flag("--strict", strict, "treat dt-halving retries as failures");
  sim->add_option("--seed", seed, "rng seed (overrides run.seed)");

  auto* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("suite", suite, "identities|regularization|dispersion|equivalence|dpgg|reference|delta|all")
      ->required();
  ver->add_option("--out", out_dir, "directory for the JSON report");

  auto* swp = app.add_subcommand("sweep", "run one simulation per axis value");
  swp->add_option("config", config_path, "template config file")->required();
  swp->add_option("--axis", axis, "config key to vary, e.g. model.delta")->required();
  swp->add_option("--values", values_csv, "comma-separated values")->required();
  swp->add_option("--out", out_dir, "sweep root directory (overrides run.out)");
  swp->add_flag("--strict", strict, "treat dt-halving retries as failures");
  swp->add_option("--seed", seed, "rng seed (overrides run.seed)");

  auto* ins = app.add_subcommand("inspect", "print a snapshot header and field stats");
  ins->add_option("snapshot", snapshot_path, "snapshot file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      chdg::RunConfig cfg = chdg::parse_config(slurp(config_path));
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
      return chdg::run_simulation(cfg, strict);
    }
    if (ver->parsed()) return chdg::run_verification(suite, out_dir, std::cout);
    if (swp->parsed()) {
      chdg::RunConfig cfg = chdg::parse_config(slurp(config_path));
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
      std::vector<std::string> values;
      std::stringstream ss(values_csv);
      std::string item;
      while (std::getline(ss, item, ',')) values.push_back(item);
      return chdg::run_sweep(cfg, axis, values, strict);
    }
    if (ins->parsed()) return chdg::inspect_snapshot(snapshot_path, std::cout);
  } catch (const chdg::ConfigError& e) {
    std::cerr << "config error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
