#include "addbo/synthetic.hpp"

#include "addbo/error.hpp"
#include "addbo/random.hpp"

#include <Eigen/Eigenvalues>

#include <random>

namespace addbo {

SyntheticFunction::SyntheticFunction(Domain domain, DependencyGraph graph, std::vector<ComponentTable> components,
                                     const SyntheticOptions& options)
    : domain_(std::move(domain)), graph_(std::move(graph)), components_(std::move(components)) {
  if (graph_.dim() != domain_.dim()) throw InvalidArgument("graph and domain dimensions differ");
  const auto best = maximize_additive(graph_, components_, domain_, options.acquisition, options.tree);
  optimum_value_ = best.value;
  optimizer_ = best.argmax;
}

SyntheticFunction sample_synthetic(const DependencyGraph& graph, const KernelParams& params, const Domain& domain,
                                   std::uint64_t seed, const SyntheticOptions& options) {
  if (graph.dim() != domain.dim()) throw InvalidArgument("graph and domain dimensions differ");
  params.validate(domain.dim());
  const Decomposition decomp = maximal_cliques(graph);
  const Eigen::VectorXd scales = group_scales(decomp);
  Rng rng = make_rng(seed, Stream::kSynthetic);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<ComponentTable> components;
  components.reserve(decomp.size());
  for (std::size_t i = 0; i < decomp.size(); ++i) {
    const Group& group = decomp[i];
    if (domain.cardinality(group) > static_cast<std::uint64_t>(options.max_component_table)) {
      throw CapacityError("component sub-grid of " + std::to_string(domain.cardinality(group)) +
                          " points exceeds cap " + std::to_string(options.max_component_table));
    }
    const SubGrid grid(domain, group);
    const auto g = static_cast<Eigen::Index>(group.size());
    Eigen::MatrixXd configs(grid.size(), g);
    Eigen::VectorXd lg(g);
    std::vector<int> digits(group.size());
    for (Eigen::Index c = 0; c < grid.size(); ++c) {
      grid.decode(c, digits);
      for (Eigen::Index k = 0; k < g; ++k) configs(c, k) = domain.value(group[k], digits[k]);
    }
    for (Eigen::Index k = 0; k < g; ++k) lg[k] = params.lengthscales[group[k]];
    const Eigen::MatrixXd cov = group_cross_kernel(configs, configs, lg, scales[static_cast<Eigen::Index>(i)]);

    // Symmetric square root handles the rank deficiency of smooth kernels on
    // dense grids without perturbing the covariance.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed while sampling a component");
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::VectorXd z(grid.size());
    for (Eigen::Index c = 0; c < grid.size(); ++c) z[c] = normal(rng);
    components.push_back({group, eig.eigenvectors() * root.cwiseProduct(z)});
  }
  return SyntheticFunction(domain, graph, std::move(components), options);
}

}  // namespace addbo
