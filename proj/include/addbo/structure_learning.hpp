#pragma once

#include "addbo/graph.hpp"
#include "addbo/posterior.hpp"
#include "addbo/random.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace addbo {

enum class LearningMode { kOverlap, kNoOverlap };

// Finite candidate set for each variable's lengthscale, plus the (fixed)
// observation noise used when scoring structures.
struct StructureSpace {
  std::vector<std::vector<double>> lengthscale_grids;
  double noise_variance = 0.01;

  // `count` log-spaced values in [lo, hi] for every variable.
  static StructureSpace log_spaced(int dim, double lo, double hi, int count, double noise_variance);

  int dim() const { return static_cast<int>(lengthscale_grids.size()); }
  Eigen::VectorXd lengthscales(const std::vector<int>& indices) const;
  // Index count/2 of every grid.
  std::vector<int> midpoints() const;
};

// Gibbs state: edge indicators (as a graph) and one grid index per lengthscale.
struct StructureParams {
  DependencyGraph graph;
  std::vector<int> lengthscale_indices;
  double edge_prior = 0.5;

  bool operator==(const StructureParams& other) const = default;
  void validate(const StructureSpace& space) const;
};

// Memoized log marginal likelihood over (graph, lengthscale indices) for a
// fixed data set. Counts cache misses, which is what the Gibbs budget limits.
class StructureLikelihood {
 public:
  StructureLikelihood(const ObservationSet& obs, StructureSpace space);

  const StructureSpace& space() const { return space_; }
  const ObservationSet& observations() const { return obs_; }

  // -infinity when the Gram matrix cannot be factorized.
  double operator()(const DependencyGraph& graph, const std::vector<int>& lengthscale_indices);
  double operator()(const StructureParams& params) { return (*this)(params.graph, params.lengthscale_indices); }
  bool is_cached(const DependencyGraph& graph, const std::vector<int>& lengthscale_indices) const;
  long evaluations() const { return evaluations_; }

 private:
  std::vector<std::uint8_t> key(const DependencyGraph& graph, const std::vector<int>& indices) const;
  double compute(const DependencyGraph& graph, const std::vector<int>& indices) const;

  const ObservationSet& obs_;
  StructureSpace space_;
  std::vector<Eigen::MatrixXd> sq_dist_;  // per variable, (x_a - x_b)^2
  std::map<std::vector<std::uint8_t>, double> cache_;
  long evaluations_ = 0;
};

// P(Z_ij = 1 | rest) computed in log space.
double edge_conditional(int i, int j, const StructureParams& params, StructureLikelihood& likelihood);
double edge_conditional(int i, int j, const StructureParams& params, const ObservationSet& obs,
                        const StructureSpace& space);

// Categorical over the grid of variable i's lengthscale.
std::vector<double> lengthscale_conditional(int i, const StructureParams& params, StructureLikelihood& likelihood);
std::vector<double> lengthscale_conditional(int i, const StructureParams& params, const ObservationSet& obs,
                                            const StructureSpace& space);

// Group label per variable; labels canonical (first appearance order 0, 1, ...).
using Partition = std::vector<int>;

Partition canonical_partition(const Partition& labels);
// Connected components of `graph`.
Partition partition_of(const DependencyGraph& graph);
DependencyGraph graph_of(const Partition& partition);

// Candidate partitions for variable v: join each other group, or stand alone.
std::vector<Partition> no_overlap_candidates(int v, const Partition& partition);
// Normalized e^phi over no_overlap_candidates.
std::vector<double> no_overlap_weights(int v, const Partition& partition, const std::vector<int>& lengthscale_indices,
                                       StructureLikelihood& likelihood);
Partition no_overlap_step(int v, const Partition& partition, const std::vector<int>& lengthscale_indices,
                          StructureLikelihood& likelihood, Rng& rng);

struct GibbsOptions {
  // N_Gibbs: cap on distinct likelihood evaluations.
  long max_evaluations = 200;
  LearningMode mode = LearningMode::kOverlap;
  std::uint64_t seed = 0;
  // Cap on coordinate updates; 0 means 10 * max_evaluations.
  long max_steps = 0;
  bool learn_lengthscales = true;
};

struct GibbsEntry {
  StructureParams params;
  double log_likelihood = 0.0;
};

struct GibbsTrace {
  // State after every coordinate update, starting with the initial state.
  std::vector<GibbsEntry> visited;
  // Every distinct state whose likelihood was computed, in evaluation order.
  std::vector<GibbsEntry> evaluated;
  StructureParams best_params;
  double best_log_likelihood = 0.0;
  long likelihood_evaluation_count = 0;
  long steps = 0;
};

// Coordinate-wise Gibbs sampling over edges (or partitions in no-overlap
// mode) and lengthscale indices; stops when the next update would exceed the
// evaluation budget. The best state is the highest-likelihood one evaluated.
GibbsTrace gibbs_learn(const ObservationSet& obs, const StructureParams& init, const StructureSpace& space,
                       const GibbsOptions& options);

}  // namespace addbo
