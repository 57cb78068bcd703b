#pragma once

#include "addbo/acquisition.hpp"
#include "addbo/domain.hpp"
#include "addbo/graph.hpp"
#include "addbo/kernel.hpp"

#include <cstdint>
#include <vector>

namespace addbo {

struct SyntheticOptions {
  // Largest sub-grid a single component may be sampled on.
  Eigen::Index max_component_table = 4096;
  JunctionTreeOptions tree;
  AcquisitionOptions acquisition;
};

// f(x) = sum_i f_i(x_i) with each f_i tabulated on its group's sub-grid.
class SyntheticFunction {
 public:
  SyntheticFunction(Domain domain, DependencyGraph graph, std::vector<ComponentTable> components,
                    const SyntheticOptions& options = {});

  double operator()(const GridPoint& point) const { return evaluate_terms(components_, domain_, point); }

  const Domain& domain() const { return domain_; }
  const DependencyGraph& true_graph() const { return graph_; }
  const std::vector<ComponentTable>& components() const { return components_; }
  double optimum_value() const { return optimum_value_; }
  const GridPoint& optimizer() const { return optimizer_; }

 private:
  Domain domain_;
  DependencyGraph graph_;
  std::vector<ComponentTable> components_;
  double optimum_value_ = 0.0;
  GridPoint optimizer_;
};

// Draws each component exactly from GP(0, kappa_i) on its sub-grid (one
// component per maximal clique of `graph`); the optimum is found by message
// passing over the true decomposition.
SyntheticFunction sample_synthetic(const DependencyGraph& graph, const KernelParams& params, const Domain& domain,
                                   std::uint64_t seed, const SyntheticOptions& options = {});

}  // namespace addbo
