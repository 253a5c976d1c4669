#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bmv/commands.hpp"

// Exit codes: 0 success, 2 config error, 3 numeric/assertion failure.

namespace {

struct CliOptions {
  std::string config_path;
  long long seed_override = -1;
  int jobs = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "TOML configuration file")->required();
  cmd->add_option("--seed", opt.seed_override, "override the config seed");
  cmd->add_option("--jobs", opt.jobs, "worker thread count (default: hardware)");
  cmd->add_flag("--quiet", opt.quiet, "suppress progress notes");
}

bmv::RunConfig load(const CliOptions& opt) {
  bmv::RunConfig config = bmv::parse_config(opt.config_path);
  if (opt.seed_override >= 0) config.seed = static_cast<std::uint64_t>(opt.seed_override);
  config.jobs = opt.jobs;
  config.quiet = opt.quiet;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-probe gravitational entanglement protocol simulator"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* run = app.add_subcommand("run", "single protocol run with witness estimates");
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate a parameter grid");
  CLI::App* feas = app.add_subcommand("feasibility", "geometry, trap and timing report");
  CLI::App* gwt = app.add_subcommand("gwt", "classical-mediator separability scan");
  for (CLI::App* cmd : {run, sweep, feas, gwt}) add_common(cmd, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    const bmv::RunConfig config = load(opt);
    if (run->parsed()) return bmv::cmd_run(config);
    if (sweep->parsed()) return bmv::cmd_sweep(config);
    if (feas->parsed()) return bmv::cmd_feasibility(config);
    return bmv::cmd_gwt(config);
  } catch (const bmv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
