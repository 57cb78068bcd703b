#pragma once

#include "addbo/bo.hpp"
#include "addbo/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace addbo::cli {

// Flat "key = value" configuration shared by all commands; '#' starts a comment.
struct ExperimentConfig {
  std::string graph = "star";  // star | grid | chain | file
  std::filesystem::path graph_file;
  int dim = 10;
  int grid_rows = 3;
  int grid_cols = 3;
  int grid_size = 10;
  // Every variable takes grid_size evenly spaced values in [domain_lo, domain_hi].
  double domain_lo = 0.0;
  double domain_hi = 3.5;

  std::vector<BoMode> modes{BoMode::kOverlap, BoMode::kNoOverlap, BoMode::kOracle, BoMode::kRandom};
  int runs = 10;
  std::uint64_t seed = 0;
  bool function_per_run = false;
  std::filesystem::path out = "out";

  int n_init = 10;
  int n_iter = 100;
  std::string beta = "0.5*log(2t)";
  int n_cyc = 30;
  long n_gibbs = 200;
  long max_eval = 1000;
  long max_table_size = 1'000'000;
  int max_treewidth = 8;
  long max_component_table = 4096;

  double noise_variance = 0.01;
  // l = 1/sqrt(0.2), i.e. a kernel precision of 0.2 per coordinate.
  double true_lengthscale = 2.2360679774997898;
  double lengthscale_min = 0.5;
  double lengthscale_max = 8.0;
  int lengthscale_count = 8;
  double edge_prior = 0.5;

  int n_obs = 200;
  int scan_points = 1000;
  int info_gain_T = 20;
  int info_gain_candidates = 100;

  std::filesystem::path data;

  // The true dependency graph selected by `graph` (and its dimension).
  DependencyGraph true_graph() const;
  Domain domain() const;
  BoConfig bo_config(BoMode mode, std::uint64_t run_seed) const;
  StructureSpace structure_space() const;
  void validate() const;
};

// Throws ParseError (with line number) on syntax errors, unknown keys and
// out-of-range values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<BoMode> parse_mode_list(const std::string& text);

}  // namespace addbo::cli
