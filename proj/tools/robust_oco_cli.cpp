#include <iostream>

#include <CLI11.hpp>

#include "robust_oco/commands.hpp"

namespace {

void add_config_flags(CLI::App* cmd, robust_oco::CliOptions& o) {
  cmd->add_option("--preset", o.preset, "Preset experiment: ridge or svm");
  cmd->add_option("-c,--config", o.config_path, "Config file (key = value, dotted keys)");
  cmd->add_option("-o,--out", o.out_dir, "Output directory");
  cmd->add_option("--T", o.T, "Number of rounds");
  cmd->add_option("--k", o.k, "Number of outlier rounds");
  cmd->add_option("--seeds", o.seeds, "Seeds: 1,2,3 or 1..30");
  cmd->add_option("--learner", o.learner, "ogd, learn, topk, uncertain_topk or learn_experts");
  cmd->add_option("--alpha", o.alpha, "Fixed step size (0 selects 1/sqrt(T))");
  cmd->add_option("--a", o.a, "LEARN parameter a");
  cmd->add_option("--b", o.b, "LEARN parameter b");
  cmd->add_option("--lambda", o.lambda, "Regularization weight");
  cmd->add_option("--scale", o.scale, "Multiplies T; the k-grid follows the scaled T");
  cmd->add_option("--workers", o.workers, "Worker threads (0 = hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace robust_oco;
  CLI::App app{"Outlier-robust online convex optimization experiments"};
  app.require_subcommand(1);
  CliOptions options;

  auto* run = app.add_subcommand("run", "Run one (learner, k) cell over all seeds");
  add_config_flags(run, options);
  auto* sweep = app.add_subcommand("sweep", "Run the learner x k grid of a preset");
  add_config_flags(sweep, options);
  auto* verify = app.add_subcommand("verify", "Run the numerical verification suite");
  verify->add_option("--samples", options.samples, "Samples per check");
  auto* dump = app.add_subcommand("dump-stream", "Write the round stream and final iterates");
  add_config_flags(dump, options);
  dump->add_option("--subsample", options.subsample, "Keep this many randomly chosen rounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    options.env_seed = seed_from_environment();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (run->parsed()) return cmd_run(options, std::cout, std::cerr);
  if (sweep->parsed()) return cmd_sweep(options, std::cout, std::cerr);
  if (verify->parsed()) return cmd_verify(options, std::cout, std::cerr);
  return cmd_dump_stream(options, std::cout, std::cerr);
}
