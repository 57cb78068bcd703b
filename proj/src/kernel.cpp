#include "addbo/kernel.hpp"

#include <string>

namespace addbo {

void KernelParams::validate(int dim) const {
  if (lengthscales.size() != dim) {
    throw InvalidArgument("expected " + std::to_string(dim) + " lengthscales, got " +
                          std::to_string(lengthscales.size()));
  }
  if (!(lengthscales.array() > 0.0).all() || !lengthscales.allFinite()) {
    throw InvalidArgument("lengthscales must be positive and finite");
  }
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw InvalidArgument("noise variance must be positive and finite");
  }
}

Eigen::VectorXd group_scales(const Decomposition& decomp) {
  Eigen::VectorXd scales(static_cast<Eigen::Index>(decomp.size()));
  double total = 0.0;
  for (const auto& g : decomp) total += static_cast<double>(g.size());
  for (std::size_t i = 0; i < decomp.size(); ++i) scales[static_cast<Eigen::Index>(i)] = decomp[i].size() / total;
  return scales;
}

Eigen::MatrixXd group_cross_kernel(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b,
                                   const Eigen::Ref<const Eigen::VectorXd>& group_lengthscales, double scale) {
  if (a.cols() != group_lengthscales.size() || b.cols() != group_lengthscales.size()) {
    throw InvalidArgument("point dimension does not match group size");
  }
  Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(a.rows(), b.rows());
  for (Eigen::Index k = 0; k < group_lengthscales.size(); ++k) {
    const Eigen::ArrayXd ak = a.col(k).array() / group_lengthscales[k];
    const Eigen::ArrayXd bk = b.col(k).array() / group_lengthscales[k];
    quad.array() += (ak.replicate(1, b.rows()) - bk.transpose().replicate(a.rows(), 1)).square();
  }
  return scale * (-0.5 * quad.array()).exp().matrix();
}

Eigen::MatrixXd component_cross_kernel(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                       const Eigen::Ref<const Eigen::MatrixXd>& b, const Group& group, double scale,
                                       const Eigen::VectorXd& lengthscales) {
  const auto g = static_cast<Eigen::Index>(group.size());
  Eigen::MatrixXd ag(a.rows(), g), bg(b.rows(), g);
  Eigen::VectorXd lg(g);
  for (Eigen::Index k = 0; k < g; ++k) {
    ag.col(k) = a.col(group[k]);
    bg.col(k) = b.col(group[k]);
    lg[k] = lengthscales[group[k]];
  }
  return group_cross_kernel(ag, bg, lg, scale);
}

Eigen::MatrixXd additive_cross_kernel(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                      const Eigen::Ref<const Eigen::MatrixXd>& b, const Decomposition& decomp,
                                      const KernelParams& params) {
  if (a.cols() != params.lengthscales.size() || b.cols() != params.lengthscales.size()) {
    throw InvalidArgument("point dimension does not match kernel dimension");
  }
  const Eigen::VectorXd scales = group_scales(decomp);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(a.rows(), b.rows());
  for (std::size_t i = 0; i < decomp.size(); ++i) {
    k += component_cross_kernel(a, b, decomp[i], scales[static_cast<Eigen::Index>(i)], params.lengthscales);
  }
  return k;
}

}  // namespace addbo
