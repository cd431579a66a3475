#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "psurf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"psurf: pseudospherical surfaces from loop-group potentials"};
  app.require_subcommand(1);

  std::string config;
  std::string output_dir = ".";
  unsigned threads = 0;
  int trunc = 0;
  unsigned long long seed = 0;

  const char* names[] = {"build", "verify", "sweep"};
  const char* help[] = {"reconstruct frames, write meshes and a report",
                        "run the configured verification suites",
                        "write one mesh per lambda and family.csv"};
  for (int k = 0; k < 3; ++k) {
    CLI::App* sub = app.add_subcommand(names[k], help[k]);
    sub->add_option("config", config, "run configuration file")->required();
    sub->add_option("--output-dir", output_dir, "directory for meshes and reports");
    sub->add_option("--threads", threads, "worker threads (overrides [run] threads)")->check(CLI::PositiveNumber);
    sub->add_option("--trunc", trunc, "initial Birkhoff truncation (overrides [birkhoff] trunc)");
    sub->add_option("--seed", seed, "seed for sampled checks (overrides [run] seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? psurf::kExitPass : psurf::kExitConfigError;
  }

  psurf::CommandOptions opt;
  opt.output_dir = output_dir;
  opt.log = &std::cerr;
  for (const char* n : names) {
    CLI::App* sub = app.get_subcommand(n);
    if (!sub->parsed()) continue;
    if (sub->count("--threads")) opt.threads = threads;
    if (sub->count("--trunc")) opt.trunc = trunc;
    if (sub->count("--seed")) opt.seed = seed;
    return psurf::run_command(n, config, opt);
  }
  return psurf::kExitConfigError;
}
