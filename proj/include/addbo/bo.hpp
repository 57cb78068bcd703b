#pragma once

#include "addbo/acquisition.hpp"
#include "addbo/domain.hpp"
#include "addbo/graph.hpp"
#include "addbo/junction_tree.hpp"
#include "addbo/structure_learning.hpp"
#include "addbo/synthetic.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace addbo {

enum class BoMode { kOverlap, kNoOverlap, kOracle, kRandom };

std::string to_string(BoMode mode);
// "overlap", "no_overlap", "oracle", "random"
BoMode parse_mode(const std::string& name);

struct BoConfig {
  int n_init = 10;
  int n_iter = 100;
  BetaSchedule beta = BetaSchedule::logarithmic(0.5, 2.0);
  int n_cyc = 30;
  long n_gibbs = 200;
  BoMode mode = BoMode::kOverlap;
  std::uint64_t seed = 0;
  // Observation noise variance; also the model's eta^2.
  double noise_variance = 0.01;
  // Lengthscale candidates for structure learning (its noise is overwritten
  // with noise_variance).
  StructureSpace space;
  double edge_prior = 0.5;
  // First learning round starts here; defaults to the empty graph with grid
  // midpoints.
  std::optional<StructureParams> initial_structure;
  JunctionTreeOptions tree;
  AcquisitionOptions acquisition{1'000'000, 1000};

  void validate(int dim) const;
};

struct Truth {
  DependencyGraph graph;
  Eigen::VectorXd lengthscales;
};

// Noise-free objective and its exact maximum over the domain.
struct Objective {
  std::function<double(const GridPoint&)> value;
  double optimum_value = 0.0;

  static Objective from(const SyntheticFunction& f);
};

struct IterationRecord {
  int t = 0;
  GridPoint x;
  double y = 0.0;
  double regret = 0.0;
  // Best regret among all evaluations so far, initial design included.
  double simple_regret = 0.0;
  // Mean regret of queries 1..t.
  double average_regret = 0.0;
};

struct LearningRound {
  int round = 0;
  // Iteration about to be chosen with this structure.
  int t = 0;
  DependencyGraph graph;
  Eigen::VectorXd lengthscales;
  double log_likelihood = 0.0;
  long evaluations = 0;
  // Set only when a truth graph is known.
  std::optional<double> cc;
  std::optional<double> cs;
  // True when the learner's best graph was too wide and a narrower one was used.
  bool capped = false;
};

struct RegretTrace {
  BoMode mode = BoMode::kOverlap;
  std::vector<GridPoint> initial_points;
  std::vector<double> initial_values;
  std::vector<IterationRecord> iterations;
  std::vector<LearningRound> rounds;
  // Iterations whose acquisition maximization exceeded the max_eval budget.
  int max_eval_exceeded = 0;
};

// Generalized additive GP-UCB. Overlap/no-overlap learn the structure before
// iteration 1 and every n_cyc iterations after; oracle uses `truth`; random
// samples uniformly. Performs exactly n_init + n_iter objective evaluations.
RegretTrace run_bo(const BoConfig& config, const Domain& domain, const Objective& objective,
                   const std::optional<Truth>& truth = std::nullopt);

struct GraphAccuracy {
  double cc = 1.0;
  double cs = 1.0;
};

// Correct connections / correct separations of `learned` against `truth`;
// a truth with no edges (non-edges) gives CC (CS) = 1.
GraphAccuracy graph_accuracy(const DependencyGraph& learned, const DependencyGraph& truth);

struct RegretAggregate {
  std::vector<int> t;
  Eigen::VectorXd simple_mean, simple_se;
  Eigen::VectorXd average_mean, average_se;
  std::vector<int> round_t;
  Eigen::VectorXd cc_mean, cc_se, cs_mean, cs_se;
};

// Elementwise mean and standard error (sample std / sqrt(runs)).
RegretAggregate aggregate_runs(std::span<const RegretTrace> traces);

// "t,x_1..x_D,y,r,S,Ravg"
void write_trace_csv(std::ostream& out, const RegretTrace& trace, const Domain& domain);
// "round,t,CC,CS"
void write_rounds_csv(std::ostream& out, const RegretTrace& trace);
void write_aggregate_csv(std::ostream& out, const RegretAggregate& agg);
void write_aggregate_rounds_csv(std::ostream& out, const RegretAggregate& agg);

}  // namespace addbo
