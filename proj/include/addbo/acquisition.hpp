#pragma once

#include "addbo/domain.hpp"
#include "addbo/junction_tree.hpp"
#include "addbo/posterior.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace addbo {

// Values of one additive term on every configuration of its group's
// sub-grid (SubGrid order).
struct ComponentTable {
  Group group;
  Eigen::VectorXd values;
};

struct AcquisitionOptions {
  // Per-clique cap on materialized table entries.
  Eigen::Index max_table_size = 1'000'000;
  // Soft budget on total entries per maximization; exceeding it is reported,
  // never enforced. 0 disables the report.
  Eigen::Index max_eval = 0;
};

struct AcquisitionResult {
  GridPoint argmax;
  double value = 0.0;
  Eigen::Index entries_evaluated = 0;
  bool max_eval_exceeded = false;
};

// Exact maximization of sum_i terms[i] by max-sum message passing with
// backpointers. `terms[i].group` must equal `tree.terms[i]`.
AcquisitionResult maximize_acquisition(const JunctionTree& tree, std::span<const ComponentTable> terms,
                                       const Domain& domain, const AcquisitionOptions& options = {});

// Triangulates `graph`, builds the junction tree and maximizes.
AcquisitionResult maximize_additive(const DependencyGraph& graph, std::span<const ComponentTable> terms,
                                    const Domain& domain, const AcquisitionOptions& options = {},
                                    const JunctionTreeOptions& tree_options = {});

double evaluate_terms(std::span<const ComponentTable> terms, const Domain& domain, const GridPoint& point);

struct BruteForceResult {
  GridPoint argmax;
  double value = 0.0;
};

inline constexpr std::uint64_t kBruteForceCapacity = 10'000'000;

// Exhaustive search in lexicographic order; the first maximizer wins ties.
BruteForceResult brute_force_maximize(const Domain& domain, const std::function<double(const GridPoint&)>& evaluator,
                                      std::uint64_t capacity = kBruteForceCapacity);

// mean + sqrt(beta) * sqrt(variance)
double component_ucb(const Moments& moments, double beta);
double component_ucb(const AdditivePosterior& posterior, int group_index, const Eigen::Ref<const Eigen::VectorXd>& xq,
                     double beta);

// UCB term for every group of the posterior's decomposition.
std::vector<ComponentTable> ucb_tables(const AdditivePosterior& posterior, const Domain& domain, double beta,
                                       Eigen::Index max_table_size = 1'000'000);

// t -> beta_t; either a constant or scale * log(factor * t).
class BetaSchedule {
 public:
  static BetaSchedule constant(double value) { return BetaSchedule(0.0, 0.0, value); }
  static BetaSchedule logarithmic(double scale, double factor) { return BetaSchedule(scale, factor, 0.0); }
  // Accepts "0.5*log(2t)", "0.5 * log(2*t)" or a plain number.
  static BetaSchedule parse(const std::string& text);

  double operator()(int t) const;
  std::string describe() const;

 private:
  BetaSchedule(double scale, double factor, double constant) : scale_(scale), factor_(factor), constant_(constant) {}
  double scale_;
  double factor_;
  double constant_;
};

}  // namespace addbo
