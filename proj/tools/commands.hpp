#pragma once

#include "config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace addbo::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kCapacityError = 3,
  kNumericalError = 4,
  kInvariantViolation = 5,
};

struct Overrides {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<int> runs;
  std::optional<std::string> modes;
  std::optional<std::filesystem::path> data;
};

// Regret experiments: one trace per (mode, run) plus per-mode aggregates.
int cmd_synth(const ExperimentConfig& cfg, std::ostream& log);
// Structure learning on a data CSV; writes learned.edges and gibbs_trace.csv.
int cmd_learn(const ExperimentConfig& cfg, std::ostream& log);
// Variance-gap scan and greedy information gain; exit 5 on inequality violations.
int cmd_analyze(const ExperimentConfig& cfg, std::ostream& log);

// Loads the config, applies overrides, dispatches and maps errors to exit codes.
int run_command(const std::string& command, const Overrides& overrides, std::ostream& log);

// Worker count: ADDBO_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

}  // namespace addbo::cli
