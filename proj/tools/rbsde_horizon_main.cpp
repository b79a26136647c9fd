// Command-line front end: run or verify a scenario file, or print the schema.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "rbsde/parallel.hpp"
#include "rbsde/scenario.hpp"

namespace {

int run_one(const std::string& config, const std::string& out_dir, int threads,
            const std::vector<double>& ps, bool verify_only) {
  rbsde::RunOptions opt;
  opt.out_dir_override = out_dir;
  opt.threads = threads;
  opt.p_override = ps;
  opt.verify_only = verify_only;
  const rbsde::RunReport rep = rbsde::run_scenario_file(config, opt);
  for (const auto& line : rep.lines) std::cout << line << "\n";
  if (rep.exit_code == 2 || rep.exit_code == 3)
    std::cerr << "error: see report lines above (exit " << rep.exit_code << ")\n";
  return rep.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflected BSDE engine under a random horizon on a binary lattice"};
  app.require_subcommand(1);

  std::string config, out_dir;
  int threads = 0;
  std::vector<double> ps;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config, "scenario file (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides output_dir)");
    cmd->add_option("--threads", threads, "worker threads (or RBSDE_THREADS)");
    cmd->add_option("--p", ps, "override the p grid")->delimiter(',');
  };

  CLI::App* run = app.add_subcommand("run", "run the scenario and write all outputs");
  add_common(run);
  CLI::App* verify = app.add_subcommand("verify", "run checks only, no solution tables");
  add_common(verify);
  CLI::App* schema = app.add_subcommand("schema", "print the scenario file schema");

  CLI11_PARSE(app, argc, argv);

  if (schema->parsed()) {
    std::cout << rbsde::config_schema();
    return 0;
  }
  return run_one(config, out_dir, threads, ps, verify->parsed());
}
