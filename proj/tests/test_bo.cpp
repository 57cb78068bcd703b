#include "addbo/bo.hpp"
#include "addbo/error.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace addbo;

namespace {

struct Setup {
  DependencyGraph graph;
  Domain domain;
  KernelParams kernel;
  SyntheticFunction f;
};

Setup star_setup(int d, int grid, std::uint64_t seed) {
  auto graph = DependencyGraph::star(d);
  auto domain = Domain::uniform_grid(d, grid, 0.0, 3.5);
  auto kernel = KernelParams::uniform(d, std::sqrt(5.0), 0.01);
  auto f = sample_synthetic(graph, kernel, domain, seed);
  return {graph, domain, kernel, std::move(f)};
}

BoConfig small_config(BoMode mode, std::uint64_t seed) {
  BoConfig c;
  c.mode = mode;
  c.seed = seed;
  c.n_init = 5;
  c.n_iter = 12;
  c.n_cyc = 5;
  c.n_gibbs = 40;
  c.space = StructureSpace::log_spaced(4, 0.5, 8.0, 4, 0.01);
  return c;
}

std::string trace_text(const RegretTrace& trace, const Domain& domain) {
  std::ostringstream out;
  write_trace_csv(out, trace, domain);
  return out.str();
}

}  // namespace

TEST_CASE("graph accuracy unit cases") {
  const auto star = DependencyGraph::star(10);
  const auto same = graph_accuracy(star, star);
  CHECK(same.cc == 1.0);
  CHECK(same.cs == 1.0);

  DependencyGraph partial(10);
  for (int v = 1; v <= 6; ++v) partial.set_edge(0, v);
  const auto p = graph_accuracy(partial, star);
  CHECK(p.cc == 2.0 / 3.0);
  CHECK(p.cs == 1.0);

  const auto c = graph_accuracy(DependencyGraph::complete(10), star);
  CHECK(c.cc == 1.0);
  CHECK(c.cs == 0.0);

  const auto empty_truth = graph_accuracy(star, DependencyGraph(10));
  CHECK(empty_truth.cc == 1.0);
  CHECK_THROWS_AS(graph_accuracy(star, DependencyGraph(9)), InvalidArgument);
}

TEST_CASE("mode names") {
  for (auto m : {BoMode::kOverlap, BoMode::kNoOverlap, BoMode::kOracle, BoMode::kRandom}) {
    CHECK(parse_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_mode("greedy"), InvalidArgument);
}

TEST_CASE("every mode spends exactly n_init + n_iter evaluations and tracks regret") {
  const auto s = star_setup(4, 5, 1);
  const Truth truth{s.graph, s.kernel.lengthscales};
  for (auto mode : {BoMode::kOverlap, BoMode::kNoOverlap, BoMode::kOracle, BoMode::kRandom}) {
    int calls = 0;
    Objective obj{[&](const GridPoint& p) {
                    ++calls;
                    return s.f(p);
                  },
                  s.f.optimum_value()};
    const auto trace = run_bo(small_config(mode, 2), s.domain, obj, truth);
    CHECK(calls == 17);
    CHECK(trace.initial_points.size() == 5);
    REQUIRE(trace.iterations.size() == 12);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : trace.initial_points) best = std::min(best, s.f.optimum_value() - s.f(x));
    double sum = 0.0;
    for (const auto& it : trace.iterations) {
      CHECK(it.regret >= -1e-12);
      CHECK(it.regret == doctest::Approx(s.f.optimum_value() - s.f(it.x)));
      best = std::min(best, it.regret);
      sum += it.regret;
      CHECK(it.simple_regret == best);
      CHECK(it.average_regret == doctest::Approx(sum / it.t));
    }
    const bool learns = mode == BoMode::kOverlap || mode == BoMode::kNoOverlap;
    CHECK(trace.rounds.size() == (learns ? 3u : 0u));
    if (learns) {
      CHECK(trace.rounds[0].t == 1);
      CHECK(trace.rounds[1].t == 6);
      CHECK(trace.rounds[2].t == 11);
      for (const auto& r : trace.rounds) {
        CHECK(r.evaluations <= 40);
        CHECK(r.cc.has_value());
      }
    }
  }
}

TEST_CASE("identical seeds give identical traces") {
  const auto s = star_setup(4, 5, 3);
  const Truth truth{s.graph, s.kernel.lengthscales};
  for (auto mode : {BoMode::kOverlap, BoMode::kNoOverlap, BoMode::kOracle, BoMode::kRandom}) {
    const auto a = run_bo(small_config(mode, 9), s.domain, Objective::from(s.f), truth);
    const auto b = run_bo(small_config(mode, 9), s.domain, Objective::from(s.f), truth);
    CHECK(trace_text(a, s.domain) == trace_text(b, s.domain));
  }
}

TEST_CASE("initial design is shared across modes") {
  const auto s = star_setup(4, 5, 4);
  const Truth truth{s.graph, s.kernel.lengthscales};
  const auto a = run_bo(small_config(BoMode::kOracle, 5), s.domain, Objective::from(s.f), truth);
  const auto b = run_bo(small_config(BoMode::kRandom, 5), s.domain, Objective::from(s.f), truth);
  CHECK(a.initial_points == b.initial_points);
  CHECK(a.initial_values == b.initial_values);
  std::set<GridPoint> distinct(a.initial_points.begin(), a.initial_points.end());
  CHECK(distinct.size() == a.initial_points.size());
}

TEST_CASE("oracle first query is the brute-force acquisition argmax") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto s = star_setup(4, 4, 10 + seed);
    const Truth truth{s.graph, s.kernel.lengthscales};
    auto cfg = small_config(BoMode::kOracle, seed);
    cfg.n_iter = 1;
    const auto trace = run_bo(cfg, s.domain, Objective::from(s.f), truth);

    ObservationSet obs(4);
    for (std::size_t k = 0; k < trace.initial_points.size(); ++k) {
      obs.add(s.domain.to_values(trace.initial_points[k]), trace.initial_values[k]);
    }
    const auto decomp = maximal_cliques(s.graph);
    const AdditivePosterior post(obs, decomp, s.kernel);
    const double beta = cfg.beta(1);
    const auto best = oracle::enumerate_max(s.domain, [&](const GridPoint& p) {
      double total = 0.0;
      for (int j = 0; j < static_cast<int>(decomp.size()); ++j) {
        total += component_ucb(post, j, s.domain.to_values(p), beta);
      }
      return total;
    });
    CHECK(trace.iterations[0].x == best.argmax);
  }
}

TEST_CASE("configuration checks") {
  const auto s = star_setup(4, 4, 0);
  auto cfg = small_config(BoMode::kOracle, 0);
  CHECK_THROWS_AS(run_bo(cfg, s.domain, Objective::from(s.f)), InvalidArgument);
  cfg = small_config(BoMode::kOverlap, 0);
  cfg.n_cyc = 0;
  CHECK_THROWS_AS(run_bo(cfg, s.domain, Objective::from(s.f)), InvalidArgument);
  cfg = small_config(BoMode::kOverlap, 0);
  cfg.space = StructureSpace::log_spaced(3, 0.5, 8.0, 4, 0.01);
  CHECK_THROWS_AS(run_bo(cfg, s.domain, Objective::from(s.f)), InvalidArgument);
}

TEST_CASE("aggregation: mean and standard error") {
  RegretTrace a, b, c;
  a.iterations = {{1, {}, 0, 1.0, 1.0, 1.0}, {2, {}, 0, 0.0, 0.0, 0.5}};
  b.iterations = {{1, {}, 0, 3.0, 2.0, 3.0}, {2, {}, 0, 1.0, 1.0, 2.0}};
  c.iterations = {{1, {}, 0, 2.0, 3.0, 2.0}, {2, {}, 0, 2.0, 2.0, 2.0}};
  const std::vector<RegretTrace> runs{a, b, c};
  const auto agg = aggregate_runs(runs);
  CHECK(agg.t == std::vector<int>{1, 2});
  CHECK(agg.simple_mean[0] == doctest::Approx(2.0));
  CHECK(agg.simple_se[0] == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(agg.average_mean[1] == doctest::Approx(1.5));
  CHECK(agg.simple_se[1] == doctest::Approx(1.0 / std::sqrt(3.0)));

  std::ostringstream out;
  write_aggregate_csv(out, agg);
  CHECK(out.str().rfind("t,S_mean,S_se,Ravg_mean,Ravg_se\n1,2,", 0) == 0);

  RegretTrace short_trace;
  short_trace.iterations = {a.iterations[0]};
  const std::vector<RegretTrace> bad{a, short_trace};
  CHECK_THROWS_AS(aggregate_runs(bad), InvalidArgument);
  CHECK_THROWS_AS(aggregate_runs(std::vector<RegretTrace>{}), InvalidArgument);
}

TEST_CASE("trace CSV layout") {
  const auto s = star_setup(4, 5, 6);
  auto cfg = small_config(BoMode::kRandom, 1);
  cfg.n_iter = 3;
  const auto text = trace_text(run_bo(cfg, s.domain, Objective::from(s.f)), s.domain);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x_1,x_2,x_3,x_4,y,r,S,Ravg");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(rows == 3);
}
