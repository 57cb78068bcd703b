#include "addbo/posterior.hpp"

#include "addbo/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace addbo {

ObservationSet::ObservationSet(Eigen::MatrixXd pts, Eigen::VectorXd vals)
    : points(std::move(pts)), values(std::move(vals)) {
  if (points.rows() != values.size()) throw InvalidArgument("number of points and values differ");
}

void ObservationSet::add(const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
  if (x.size() != points.cols()) throw InvalidArgument("observation dimension mismatch");
  const Eigen::Index n = size();
  points.conservativeResize(n + 1, Eigen::NoChange);
  points.row(n) = x.transpose();
  values.conservativeResize(n + 1);
  values[n] = y;
}

void ObservationSet::validate(const Domain& domain) const {
  if (points.rows() != values.size()) throw InvalidArgument("number of points and values differ");
  if (points.cols() != domain.dim()) throw InvalidArgument("observation dimension does not match domain");
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (int v = 0; v < domain.dim(); ++v) {
      if (!domain.index_of(v, points(r, v))) {
        throw InvalidArgument("observation " + std::to_string(r + 1) + " is off-grid in variable " +
                              std::to_string(v + 1));
      }
    }
  }
}

namespace {

bool try_factorize(const Eigen::MatrixXd& m, Eigen::MatrixXd& lower) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  lower = llt.matrixL();
  // Pivots at rounding level mean the matrix is numerically singular.
  const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
  return lower.diagonal().array().square().minCoeff() > 1e-14 * scale && lower.allFinite();
}

}  // namespace

FactorizedGram::FactorizedGram(Eigen::MatrixXd gram) : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols()) throw InvalidArgument("Gram matrix must be square");
  if (gram_.rows() == 0) return;
  if (!gram_.allFinite()) throw NumericalError("Gram matrix has non-finite entries");
  if (try_factorize(gram_, lower_)) return;
  for (double jitter = kMinJitter; jitter <= kMaxJitter * 1.0000001; jitter *= 10.0) {
    Eigen::MatrixXd shifted = gram_;
    shifted.diagonal().array() += jitter;
    if (try_factorize(shifted, lower_)) {
      jitter_ = jitter;
      return;
    }
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed with jitter up to " << kMaxJitter << " (n=" << gram_.rows()
      << ", min diagonal=" << gram_.diagonal().minCoeff() << ", max diagonal=" << gram_.diagonal().maxCoeff() << ")";
  throw NumericalError(msg.str());
}

Eigen::MatrixXd FactorizedGram::solve(const Eigen::Ref<const Eigen::MatrixXd>& rhs) const {
  if (rhs.rows() != size()) throw InvalidState("right-hand side size does not match factorization");
  const Eigen::MatrixXd half = lower_.triangularView<Eigen::Lower>().solve(rhs);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(half);
}

Eigen::MatrixXd FactorizedGram::half_solve(const Eigen::Ref<const Eigen::MatrixXd>& rhs) const {
  if (rhs.rows() != size()) throw InvalidState("right-hand side size does not match factorization");
  return lower_.triangularView<Eigen::Lower>().solve(rhs);
}

double FactorizedGram::log_determinant() const { return 2.0 * lower_.diagonal().array().log().sum(); }

FactorizedGram fit_gram(const ObservationSet& obs, const Decomposition& decomp, const KernelParams& params) {
  params.validate(obs.dim());
  Eigen::MatrixXd delta = additive_gram(obs.points, decomp, params);
  delta.diagonal().array() += params.noise_variance;
  return FactorizedGram(std::move(delta));
}

double clamp_variance(double variance) {
  if (variance >= 0.0) return variance;
  if (variance >= -1e-9) return 0.0;
  throw NumericalError("posterior variance " + std::to_string(variance) + " is negative beyond tolerance");
}

namespace {

void check_fresh(const FactorizedGram& gram, const ObservationSet& obs) {
  if (gram.size() != obs.size()) {
    throw InvalidState("Gram factorization has " + std::to_string(gram.size()) + " rows but there are " +
                       std::to_string(obs.size()) + " observations");
  }
}

}  // namespace

Moments posterior_component(int group_index, const Eigen::Ref<const Eigen::VectorXd>& xq, const FactorizedGram& gram,
                            const ObservationSet& obs, const Decomposition& decomp, const KernelParams& params) {
  check_fresh(gram, obs);
  if (group_index < 0 || group_index >= static_cast<int>(decomp.size())) throw InvalidArgument("group index out of range");
  if (xq.size() != obs.dim()) throw InvalidArgument("query dimension mismatch");
  const double scale = group_scales(decomp)[group_index];
  if (obs.size() == 0) return {0.0, scale};
  const Eigen::VectorXd k =
      component_cross_kernel(obs.points, xq.transpose(), decomp[group_index], scale, params.lengthscales);
  const double mean = k.dot(gram.solve(obs.values).col(0));
  const double quad = gram.half_solve(k).squaredNorm();
  return {mean, clamp_variance(scale - quad)};
}

Moments posterior_full(const Eigen::Ref<const Eigen::VectorXd>& xq, const FactorizedGram& gram,
                       const ObservationSet& obs, const Decomposition& decomp, const KernelParams& params) {
  check_fresh(gram, obs);
  if (xq.size() != obs.dim()) throw InvalidArgument("query dimension mismatch");
  const double prior = additive_kernel(xq, xq, decomp, params);
  if (obs.size() == 0) return {0.0, prior};
  const Eigen::VectorXd k = additive_cross_kernel(obs.points, xq.transpose(), decomp, params);
  const double mean = k.dot(gram.solve(obs.values).col(0));
  return {mean, clamp_variance(prior - gram.half_solve(k).squaredNorm())};
}

AdditivePosterior::AdditivePosterior(ObservationSet obs, Decomposition decomp, KernelParams params)
    : obs_(std::move(obs)), decomp_(std::move(decomp)), params_(std::move(params)), scales_(group_scales(decomp_)) {
  gram_ = fit_gram(obs_, decomp_, params_);
  alpha_ = obs_.size() > 0 ? Eigen::VectorXd(gram_.solve(obs_.values)) : Eigen::VectorXd();
}

Moments AdditivePosterior::component(int group_index, const Eigen::Ref<const Eigen::VectorXd>& xq) const {
  if (group_index < 0 || group_index >= static_cast<int>(decomp_.size())) throw InvalidArgument("group index out of range");
  if (xq.size() != obs_.dim()) throw InvalidArgument("query dimension mismatch");
  const double scale = scales_[group_index];
  if (obs_.size() == 0) return {0.0, scale};
  const Eigen::VectorXd k =
      component_cross_kernel(obs_.points, xq.transpose(), decomp_[group_index], scale, params_.lengthscales);
  return {k.dot(alpha_), clamp_variance(scale - gram_.half_solve(k).squaredNorm())};
}

Moments AdditivePosterior::full(const Eigen::Ref<const Eigen::VectorXd>& xq) const {
  return posterior_full(xq, gram_, obs_, decomp_, params_);
}

Eigen::MatrixX2d AdditivePosterior::component_table(int group_index, const Domain& domain) const {
  if (group_index < 0 || group_index >= static_cast<int>(decomp_.size())) throw InvalidArgument("group index out of range");
  const Group& group = decomp_[group_index];
  const SubGrid grid(domain, group);
  const auto g = static_cast<Eigen::Index>(group.size());
  Eigen::MatrixXd configs(grid.size(), g);
  std::vector<int> digits(group.size());
  for (Eigen::Index c = 0; c < grid.size(); ++c) {
    grid.decode(c, digits);
    for (Eigen::Index k = 0; k < g; ++k) configs(c, k) = domain.value(group[k], digits[k]);
  }
  Eigen::MatrixX2d table(grid.size(), 2);
  const double scale = scales_[group_index];
  if (obs_.size() == 0) {
    table.col(0).setZero();
    table.col(1).setConstant(scale);
    return table;
  }
  Eigen::MatrixXd observed(obs_.size(), g);
  Eigen::VectorXd lg(g);
  for (Eigen::Index k = 0; k < g; ++k) {
    observed.col(k) = obs_.points.col(group[k]);
    lg[k] = params_.lengthscales[group[k]];
  }
  const Eigen::MatrixXd cross = group_cross_kernel(observed, configs, lg, scale);  // n x m
  table.col(0) = cross.transpose() * alpha_;
  const Eigen::MatrixXd v = gram_.half_solve(cross);
  const Eigen::VectorXd quad = v.colwise().squaredNorm().transpose();
  for (Eigen::Index c = 0; c < grid.size(); ++c) table(c, 1) = clamp_variance(scale - quad[c]);
  return table;
}

double log_marginal_likelihood(const ObservationSet& obs, const Decomposition& decomp, const KernelParams& params) {
  const Eigen::Index n = obs.size();
  if (n < 1) throw InvalidArgument("log marginal likelihood needs at least one observation");
  const FactorizedGram gram = fit_gram(obs, decomp, params);
  const Eigen::VectorXd half = gram.half_solve(obs.values);
  return -0.5 * half.squaredNorm() - 0.5 * gram.log_determinant() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

double log_marginal_likelihood(const ObservationSet& obs, const DependencyGraph& graph, const KernelParams& params) {
  if (graph.dim() != obs.dim()) throw InvalidArgument("graph dimension does not match observations");
  return log_marginal_likelihood(obs, maximal_cliques(graph), params);
}

}  // namespace addbo
