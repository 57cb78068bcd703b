#pragma once

#include "addbo/domain.hpp"
#include "addbo/graph.hpp"
#include "addbo/kernel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace addbo {

// Observed points (rows, real-valued coordinates) and noisy values.
struct ObservationSet {
  Eigen::MatrixXd points;
  Eigen::VectorXd values;

  ObservationSet() = default;
  explicit ObservationSet(int dim) : points(0, dim) {}
  ObservationSet(Eigen::MatrixXd pts, Eigen::VectorXd vals);

  Eigen::Index size() const { return values.size(); }
  int dim() const { return static_cast<int>(points.cols()); }
  void add(const Eigen::Ref<const Eigen::VectorXd>& x, double y);
  // Throws InvalidArgument if any coordinate is not a grid value of `domain`.
  void validate(const Domain& domain) const;
};

// Escalating diagonal jitter tried when a plain factorization fails.
inline constexpr double kMinJitter = 1e-10;
inline constexpr double kMaxJitter = 1e-6;

// Immutable lower-triangular factorization of a symmetric positive
// (semi-)definite matrix, with the jitter that was needed to obtain it.
class FactorizedGram {
 public:
  FactorizedGram() = default;
  // Tries no jitter, then 1e-10, 1e-9, ..., 1e-6 on the diagonal; throws
  // NumericalError when every attempt fails.
  explicit FactorizedGram(Eigen::MatrixXd gram);

  Eigen::Index size() const { return gram_.rows(); }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& lower() const { return lower_; }
  double jitter_applied() const { return jitter_; }

  // (gram + jitter I)^{-1} rhs
  Eigen::MatrixXd solve(const Eigen::Ref<const Eigen::MatrixXd>& rhs) const;
  // L^{-1} rhs
  Eigen::MatrixXd half_solve(const Eigen::Ref<const Eigen::MatrixXd>& rhs) const;
  double log_determinant() const;

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd lower_;
  double jitter_ = 0.0;
};

// Delta = kappa(X, X) + eta^2 I, factorized.
FactorizedGram fit_gram(const ObservationSet& obs, const Decomposition& decomp, const KernelParams& params);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Negative variances within -1e-9 are clamped to zero; anything lower throws.
double clamp_variance(double variance);

Moments posterior_component(int group_index, const Eigen::Ref<const Eigen::VectorXd>& xq, const FactorizedGram& gram,
                            const ObservationSet& obs, const Decomposition& decomp, const KernelParams& params);

Moments posterior_full(const Eigen::Ref<const Eigen::VectorXd>& xq, const FactorizedGram& gram,
                       const ObservationSet& obs, const Decomposition& decomp, const KernelParams& params);

// Fitted additive model: caches Delta^{-1} y so repeated queries are O(n^2).
class AdditivePosterior {
 public:
  AdditivePosterior(ObservationSet obs, Decomposition decomp, KernelParams params);

  const ObservationSet& observations() const { return obs_; }
  const Decomposition& decomposition() const { return decomp_; }
  const KernelParams& params() const { return params_; }
  const FactorizedGram& gram() const { return gram_; }
  double scale(int group_index) const { return scales_[group_index]; }

  Moments component(int group_index, const Eigen::Ref<const Eigen::VectorXd>& xq) const;
  Moments full(const Eigen::Ref<const Eigen::VectorXd>& xq) const;

  // Component posterior at every configuration of the group's sub-grid, in
  // SubGrid order. Columns: mean, variance.
  Eigen::MatrixX2d component_table(int group_index, const Domain& domain) const;

 private:
  ObservationSet obs_;
  Decomposition decomp_;
  KernelParams params_;
  Eigen::VectorXd scales_;
  FactorizedGram gram_;
  Eigen::VectorXd alpha_;
};

// -1/2 y^T Delta^{-1} y - 1/2 log|Delta| - n/2 log(2 pi), with the
// decomposition given by the maximal cliques of `graph`.
double log_marginal_likelihood(const ObservationSet& obs, const DependencyGraph& graph, const KernelParams& params);
double log_marginal_likelihood(const ObservationSet& obs, const Decomposition& decomp, const KernelParams& params);

}  // namespace addbo
