#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Additive GP Bayesian optimization with overlapping groups"};
  app.require_subcommand(1);

  addbo::cli::Overrides overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", overrides.config, "Key-value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", overrides.seed, "Experiment seed");
    sub->add_option("--out", overrides.out, "Output directory");
    sub->add_option("--runs", overrides.runs, "Number of runs per mode");
    sub->add_option("--mode", overrides.modes, "Comma-separated modes: overlap,no_overlap,oracle,random");
  };
  auto* synth = app.add_subcommand("synth", "Regret experiments on synthetic additive GP functions");
  auto* learn = app.add_subcommand("learn", "Learn a dependency graph from a data CSV (x_1..x_D,y)");
  auto* analyze = app.add_subcommand("analyze", "Posterior variance gap scan and information gain sweep");
  for (auto* sub : {synth, learn, analyze}) add_common(sub);
  learn->add_option("--data", overrides.data, "Data CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : addbo::cli::kConfigError;
  }
  return addbo::cli::run_command(app.get_subcommands().front()->get_name(), overrides, std::cerr);
}
