#include "addbo/acquisition.hpp"
#include "addbo/error.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace addbo;

namespace {

std::vector<ComponentTable> random_terms(const DependencyGraph& g, const Domain& domain, Rng& rng, bool ties) {
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> small(0, 2);
  std::vector<ComponentTable> terms;
  for (const auto& group : maximal_cliques(g)) {
    const SubGrid sub(domain, group);
    Eigen::VectorXd values(sub.size());
    for (auto& v : values) v = ties ? small(rng) : normal(rng);
    terms.push_back({group, values});
  }
  return terms;
}

Domain random_domain(int d, Rng& rng) {
  std::uniform_int_distribution<int> size(1, 5);
  std::vector<std::vector<double>> values(d);
  for (auto& axis : values) {
    const int n = size(rng);
    for (int k = 0; k < n; ++k) axis.push_back(k);
  }
  return Domain(values);
}

}  // namespace

TEST_CASE("message passing equals exhaustive maximization") {
  auto rng = make_rng(51, Stream::kTest);
  for (int trial = 0; trial < 150; ++trial) {
    const int d = 1 + trial % 7;
    const auto g = oracle::random_graph(d, 0.45, rng);
    const auto domain = random_domain(d, rng);
    const bool ties = trial % 3 == 0;
    const auto terms = random_terms(g, domain, rng, ties);
    const auto result = maximize_additive(g, terms, domain);
    const auto ref = oracle::enumerate_max(domain, [&](const GridPoint& p) { return evaluate_terms(terms, domain, p); });
    CHECK(std::abs(result.value - ref.value) < 1e-9);
    CHECK(std::abs(evaluate_terms(terms, domain, result.argmax) - result.value) < 1e-9);
    CHECK(domain.contains(result.argmax));
    if (!ties) CHECK(result.argmax == ref.argmax);
  }
}

TEST_CASE("library brute force agrees with the odometer oracle") {
  auto rng = make_rng(52, Stream::kTest);
  const auto domain = random_domain(4, rng);
  const auto g = oracle::random_graph(4, 0.5, rng);
  const auto terms = random_terms(g, domain, rng, true);
  auto f = [&](const GridPoint& p) { return evaluate_terms(terms, domain, p); };
  const auto a = brute_force_maximize(domain, f);
  const auto b = oracle::enumerate_max(domain, f);
  CHECK(a.argmax == b.argmax);
  CHECK(a.value == b.value);
  CHECK_THROWS_AS(brute_force_maximize(Domain::uniform_grid(20, 10), f), CapacityError);
}

TEST_CASE("terms must match the tree") {
  const auto g = DependencyGraph::chain(3);
  const auto domain = Domain::uniform_grid(3, 2);
  auto rng = make_rng(53, Stream::kTest);
  auto terms = random_terms(g, domain, rng, false);
  const auto tree = build_junction_tree(triangulate(g), g);
  std::swap(terms[0], terms[1]);
  CHECK_THROWS_AS(maximize_acquisition(tree, terms, domain), InconsistencyError);
  terms.pop_back();
  CHECK_THROWS_AS(maximize_acquisition(tree, terms, domain), InconsistencyError);
}

TEST_CASE("clique table cap") {
  const auto g = DependencyGraph::complete(4);
  const auto domain = Domain::uniform_grid(4, 10);
  auto rng = make_rng(54, Stream::kTest);
  const auto terms = random_terms(g, domain, rng, false);
  AcquisitionOptions opts;
  opts.max_table_size = 999;
  CHECK_THROWS_AS(maximize_additive(g, terms, domain, opts), CapacityError);
  opts.max_table_size = 10000;
  opts.max_eval = 100;
  const auto r = maximize_additive(g, terms, domain, opts);
  CHECK(r.max_eval_exceeded);
  CHECK(r.entries_evaluated >= 10000);
}

TEST_CASE("UCB values") {
  CHECK(component_ucb(Moments{1.5, 4.0}, 0.0) == 1.5);
  CHECK(component_ucb(Moments{1.5, 4.0}, 0.25) == doctest::Approx(2.5));
  CHECK_THROWS_AS(component_ucb(Moments{0, 1}, -1.0), InvalidArgument);

  const Decomposition decomp{{0}, {1, 2}};
  const AdditivePosterior prior(ObservationSet(3), decomp, KernelParams::uniform(3, 1.0, 0.01));
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  CHECK(component_ucb(prior, 1, x, 1.0) == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("UCB tables follow the sub-grid order and grow with beta") {
  auto rng = make_rng(55, Stream::kTest);
  const auto domain = Domain::uniform_grid(3, 4);
  ObservationSet obs(3);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 8; ++k) obs.add(domain.to_values(oracle::random_point(domain, rng)), normal(rng));
  const Decomposition decomp{{0, 1}, {1, 2}};
  const AdditivePosterior post(obs, decomp, KernelParams::uniform(3, 0.5, 0.01));
  const auto low = ucb_tables(post, domain, 0.5);
  const auto high = ucb_tables(post, domain, 2.0);
  for (std::size_t j = 0; j < decomp.size(); ++j) {
    const SubGrid sub(domain, decomp[j]);
    std::vector<int> cfg(decomp[j].size());
    for (Eigen::Index c = 0; c < sub.size(); ++c) {
      sub.decode(c, cfg);
      GridPoint full(3, 0);
      for (std::size_t k = 0; k < cfg.size(); ++k) full[decomp[j][k]] = cfg[k];
      CHECK(low[j].values[c] ==
            doctest::Approx(component_ucb(post, static_cast<int>(j), domain.to_values(full), 0.5)).epsilon(1e-12));
      CHECK(high[j].values[c] >= low[j].values[c]);
    }
  }
  const auto g = DependencyGraph::from_groups(3, decomp);
  CHECK(maximize_additive(g, high, domain).value >= maximize_additive(g, low, domain).value);
  CHECK_THROWS_AS(ucb_tables(post, domain, 1.0, 15), CapacityError);
}

TEST_CASE("beta schedules") {
  const auto table = BetaSchedule::parse("0.5*log(2t)");
  CHECK(table(1) == doctest::Approx(0.5 * std::log(2.0)));
  CHECK(table(1) == doctest::Approx(0.34657).epsilon(1e-5));
  CHECK(table(10) == doctest::Approx(0.5 * std::log(20.0)));
  CHECK(BetaSchedule::parse(" 0.5 * log(2*t) ")(3) == doctest::Approx(0.5 * std::log(6.0)));
  CHECK(BetaSchedule::parse("2.5")(7) == 2.5);
  CHECK_THROWS_AS(BetaSchedule::parse("-1"), InvalidArgument);
  CHECK_THROWS_AS(BetaSchedule::parse("log(t)"), InvalidArgument);
  CHECK_THROWS_AS(BetaSchedule::parse("0.5*log(0.5t)"), InvalidArgument);
  CHECK_THROWS_AS(table(0), InvalidArgument);
  CHECK(BetaSchedule::parse(table.describe())(4) == doctest::Approx(table(4)));
}
