#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "docosim/cli.hpp"

int main(int argc, char **argv)
{
  CLI::App app{"docosim: decentralized online convex optimization simulator"};
  app.set_version_flag("--version", std::string(DOCOSIM_VERSION));
  app.require_subcommand(1);

  docosim::CliOptions opt;
  auto add_common = [&](CLI::App *sub, bool with_out) {
    sub->add_option("--config", opt.config, "experiment config (JSON) or run metadata file")
      ->required()
      ->check(CLI::ExistingFile);
    if (with_out)
    {
      sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    }
    sub->add_option("--jobs", opt.jobs, "worker threads (default: available cores)");
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
  };

  auto *run = app.add_subcommand("run", "run one experiment, writing trace.csv and metadata.json");
  auto *sweep = app.add_subcommand("sweep", "run every point of the config's sweep axes");
  auto *validate = app.add_subcommand("validate", "check the topology and print spectral data");
  auto *bench = app.add_subcommand("gossip-bench", "compare standard and accelerated gossip");
  auto *bounds = app.add_subcommand("bounds", "print the theoretical bound table");
  add_common(run, true);
  add_common(sweep, true);
  add_common(validate, false);
  add_common(bench, true);
  add_common(bounds, false);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : docosim::kExitUsage;
  }

  if (*run) return docosim::cmd_run(opt);
  if (*sweep) return docosim::cmd_sweep(opt);
  if (*validate) return docosim::cmd_validate(opt);
  if (*bench) return docosim::cmd_gossip_bench(opt);
  if (*bounds) return docosim::cmd_bounds(opt);
  return docosim::kExitUsage;
}
