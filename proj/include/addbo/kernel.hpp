#pragma once

#include "addbo/error.hpp"
#include "addbo/graph.hpp"

#include <Eigen/Core>

#include <cmath>

namespace addbo {

// Shared squared-exponential parameters: one lengthscale per variable, used by
// every component that contains the variable, plus the observation noise.
struct KernelParams {
  Eigen::VectorXd lengthscales;
  double noise_variance = 0.01;

  static KernelParams uniform(int dim, double lengthscale, double noise_variance) {
    return {Eigen::VectorXd::Constant(dim, lengthscale), noise_variance};
  }
  void validate(int dim) const;
};

// sigma_i = |G_i| / sum_j |G_j|, so the additive kernel has unit diagonal.
Eigen::VectorXd group_scales(const Decomposition& decomp);

// scale * exp(-1/2 sum_k ((a_k - b_k) / l_k)^2) for all row pairs of
// group-restricted point matrices (rows are points).
Eigen::MatrixXd group_cross_kernel(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b,
                                   const Eigen::Ref<const Eigen::VectorXd>& group_lengthscales, double scale);

// Component kernel between full-dimensional point sets (rows are points).
Eigen::MatrixXd component_cross_kernel(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                       const Eigen::Ref<const Eigen::MatrixXd>& b, const Group& group, double scale,
                                       const Eigen::VectorXd& lengthscales);

// Sum of all component kernels; no noise term.
Eigen::MatrixXd additive_cross_kernel(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                      const Eigen::Ref<const Eigen::MatrixXd>& b, const Decomposition& decomp,
                                      const KernelParams& params);

inline Eigen::MatrixXd additive_gram(const Eigen::Ref<const Eigen::MatrixXd>& points, const Decomposition& decomp,
                                     const KernelParams& params) {
  return additive_cross_kernel(points, points, decomp, params);
}

// kappa^(i)(xa, xb) for group-restricted points xa, xb (length |G_i|).
template <typename DerivedA, typename DerivedB>
double se_kernel_component(const Eigen::MatrixBase<DerivedA>& xa, const Eigen::MatrixBase<DerivedB>& xb,
                           int group_index, const Decomposition& decomp, const KernelParams& params) {
  if (group_index < 0 || group_index >= static_cast<int>(decomp.size())) {
    throw InvalidArgument("group index out of range");
  }
  const Group& group = decomp[group_index];
  const auto g = static_cast<Eigen::Index>(group.size());
  if (xa.size() != g || xb.size() != g) throw InvalidArgument("point dimension does not match group size");
  double quad = 0.0;
  for (Eigen::Index k = 0; k < g; ++k) {
    const double z = (xa(k) - xb(k)) / params.lengthscales[group[k]];
    quad += z * z;
  }
  return group_scales(decomp)[group_index] * std::exp(-0.5 * quad);
}

template <typename DerivedA, typename DerivedB>
double additive_kernel(const Eigen::MatrixBase<DerivedA>& xa, const Eigen::MatrixBase<DerivedB>& xb,
                       const Decomposition& decomp, const KernelParams& params) {
  if (xa.size() != params.lengthscales.size() || xb.size() != params.lengthscales.size()) {
    throw InvalidArgument("point dimension does not match kernel dimension");
  }
  const Eigen::VectorXd scales = group_scales(decomp);
  double total = 0.0;
  for (std::size_t i = 0; i < decomp.size(); ++i) {
    double quad = 0.0;
    for (int v : decomp[i]) {
      const double z = (xa(v) - xb(v)) / params.lengthscales[v];
      quad += z * z;
    }
    total += scales[static_cast<Eigen::Index>(i)] * std::exp(-0.5 * quad);
  }
  return total;
}

}  // namespace addbo
