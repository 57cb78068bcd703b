#include "addbo/error.hpp"
#include "addbo/kernel.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace addbo;

TEST_CASE("component kernel examples") {
  const Decomposition two_pairs{{0, 1}, {2, 3}};
  const auto p4 = KernelParams::uniform(4, 1.0, 0.01);
  const Eigen::Vector2d z(0.3, -0.7);
  CHECK(se_kernel_component(z, z, 0, two_pairs, p4) == doctest::Approx(0.5).epsilon(1e-15));

  const Decomposition single{{0}};
  const auto p1 = KernelParams::uniform(1, 1.0, 0.01);
  CHECK(se_kernel_component(Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0), 0, single, p1) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-15));

  // Precision 0.2 per coordinate.
  const Decomposition pair{{0, 1}};
  const auto pp = KernelParams::uniform(2, 1.0 / std::sqrt(0.2), 0.01);
  const Eigen::Vector2d a(0.0, 1.0), b(2.0, -0.5);
  const double d1 = 2.0, d2 = 1.5;
  CHECK(se_kernel_component(a, b, 0, pair, pp) == doctest::Approx(std::exp(-0.5 * (d1 * d1 + d2 * d2) * 0.2)));
}

TEST_CASE("kernel argument checks") {
  const Decomposition pair{{0, 1}};
  const auto p = KernelParams::uniform(2, 1.0, 0.01);
  const Eigen::Vector2d a(0, 0);
  CHECK_THROWS_AS(se_kernel_component(a, a, 1, pair, p), InvalidArgument);
  CHECK_THROWS_AS(se_kernel_component(Eigen::Vector3d::Zero(), a, 0, pair, p), InvalidArgument);
  CHECK_THROWS_AS(KernelParams::uniform(2, 0.0, 0.01).validate(2), InvalidArgument);
  CHECK_THROWS_AS(KernelParams::uniform(2, 1.0, 0.0).validate(2), InvalidArgument);
  CHECK_THROWS_AS(KernelParams::uniform(2, 1.0, 0.1).validate(3), InvalidArgument);
}

TEST_CASE("scales sum to one so the diagonal is one") {
  const Decomposition decomp{{0, 1, 2}, {2, 3}, {4}};
  const Eigen::VectorXd s = group_scales(decomp);
  CHECK(s.sum() == doctest::Approx(1.0));
  CHECK(s[0] == doctest::Approx(0.5));
  const auto p = KernelParams::uniform(5, 0.4, 0.01);
  auto rng = make_rng(31, Stream::kTest);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd x(5);
    for (auto& v : x) v = u(rng);
    CHECK(additive_kernel(x, x, decomp, p) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("matrix kernels agree with the pointwise oracle") {
  auto rng = make_rng(32, Stream::kTest);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 6;
    const auto g = oracle::random_graph(d, 0.4, rng);
    const auto decomp = maximal_cliques(g);
    KernelParams p{Eigen::VectorXd(d), 0.05};
    for (auto& v : p.lengthscales) v = 0.2 + u(rng);
    Eigen::MatrixXd a(7, d), b(4, d);
    for (auto& v : a.reshaped()) v = u(rng);
    for (auto& v : b.reshaped()) v = u(rng);
    const Eigen::MatrixXd k = additive_cross_kernel(a, b, decomp, p);
    CHECK((k - oracle::full_kernel(a, b, decomp, p.lengthscales)).cwiseAbs().maxCoeff() < 1e-14);
    for (int r = 0; r < 7; ++r)
      for (int c = 0; c < 4; ++c)
        CHECK(additive_kernel(a.row(r).transpose(), b.row(c).transpose(), decomp, p) ==
              doctest::Approx(k(r, c)).epsilon(1e-14));
    const Eigen::MatrixXd gram = additive_gram(a, decomp, p);
    CHECK((gram - gram.transpose()).norm() == 0.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().minCoeff() > -1e-12);
  }
}
