#include "addbo/bo.hpp"

#include "addbo/csv.hpp"
#include "addbo/error.hpp"
#include "addbo/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

namespace addbo {

std::string to_string(BoMode mode) {
  switch (mode) {
    case BoMode::kOverlap: return "overlap";
    case BoMode::kNoOverlap: return "no_overlap";
    case BoMode::kOracle: return "oracle";
    case BoMode::kRandom: return "random";
  }
  return "unknown";
}

BoMode parse_mode(const std::string& name) {
  if (name == "overlap") return BoMode::kOverlap;
  if (name == "no_overlap") return BoMode::kNoOverlap;
  if (name == "oracle") return BoMode::kOracle;
  if (name == "random") return BoMode::kRandom;
  throw InvalidArgument("unknown mode '" + name + "'");
}

void BoConfig::validate(int dim) const {
  if (n_init < 1 || n_iter < 1 || n_cyc < 1) throw InvalidArgument("n_init, n_iter and n_cyc must be >= 1");
  if (n_gibbs < 1) throw InvalidArgument("n_gibbs must be >= 1");
  if (!(noise_variance > 0.0)) throw InvalidArgument("noise variance must be positive");
  if (!(edge_prior > 0.0 && edge_prior < 1.0)) throw InvalidArgument("edge prior must lie in (0, 1)");
  for (int t = 1; t <= n_iter; ++t) {
    if (!(beta(t) >= 0.0)) throw InvalidArgument("beta schedule is negative at t=" + std::to_string(t));
  }
  if (mode == BoMode::kOverlap || mode == BoMode::kNoOverlap) {
    if (space.dim() != dim) throw InvalidArgument("lengthscale grids must cover every variable");
  }
}

Objective Objective::from(const SyntheticFunction& f) {
  return {[&f](const GridPoint& x) { return f(x); }, f.optimum_value()};
}

GraphAccuracy graph_accuracy(const DependencyGraph& learned, const DependencyGraph& truth) {
  if (learned.dim() != truth.dim()) throw InvalidArgument("graphs have different dimensions");
  int both_edges = 0, both_non_edges = 0;
  for (int i = 0; i < truth.dim(); ++i) {
    for (int j = i + 1; j < truth.dim(); ++j) {
      if (truth.has_edge(i, j)) {
        both_edges += learned.has_edge(i, j);
      } else {
        both_non_edges += !learned.has_edge(i, j);
      }
    }
  }
  GraphAccuracy acc;
  acc.cc = truth.num_edges() == 0 ? 1.0 : static_cast<double>(both_edges) / truth.num_edges();
  acc.cs = truth.num_non_edges() == 0 ? 1.0 : static_cast<double>(both_non_edges) / truth.num_non_edges();
  return acc;
}

namespace {

GridPoint uniform_point(const Domain& domain, Rng& rng) {
  GridPoint p(domain.dim());
  for (int v = 0; v < domain.dim(); ++v) p[v] = std::uniform_int_distribution<int>(0, domain.size(v) - 1)(rng);
  return p;
}

std::vector<GridPoint> initial_design(const Domain& domain, int count, Rng& rng) {
  std::vector<GridPoint> points;
  std::set<GridPoint> seen;
  const bool distinct = domain.cardinality() >= static_cast<std::uint64_t>(count);
  while (static_cast<int>(points.size()) < count) {
    GridPoint p = uniform_point(domain, rng);
    if (distinct && !seen.insert(p).second) continue;
    points.push_back(std::move(p));
  }
  return points;
}

bool fits(const DependencyGraph& graph, const Domain& domain, const BoConfig& config) {
  try {
    const auto tree = build_junction_tree(triangulate(graph), graph, config.tree);
    for (const auto& node : tree.nodes) {
      if (domain.cardinality(node) > static_cast<std::uint64_t>(config.acquisition.max_table_size)) return false;
    }
    return true;
  } catch (const CapacityError&) {
    return false;
  }
}

std::uint64_t round_seed(std::uint64_t seed, int round) {
  return seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(round + 1));
}

}  // namespace

RegretTrace run_bo(const BoConfig& config, const Domain& domain, const Objective& objective,
                   const std::optional<Truth>& truth) {
  config.validate(domain.dim());
  const bool learns = config.mode == BoMode::kOverlap || config.mode == BoMode::kNoOverlap;
  if (config.mode == BoMode::kOracle && !truth) throw InvalidArgument("oracle mode needs the true structure");
  if (truth && truth->graph.dim() != domain.dim()) throw InvalidArgument("truth graph dimension mismatch");

  Rng design_rng = make_rng(config.seed, Stream::kInitialDesign);
  Rng noise_rng = make_rng(config.seed, Stream::kObservationNoise);
  Rng search_rng = make_rng(config.seed, Stream::kRandomSearch);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_sd = std::sqrt(config.noise_variance);

  RegretTrace trace;
  trace.mode = config.mode;
  ObservationSet obs(domain.dim());
  double best_regret = std::numeric_limits<double>::infinity();
  auto evaluate = [&](const GridPoint& x) {
    const double fx = objective.value(x);
    const double y = fx + noise_sd * normal(noise_rng);
    obs.add(domain.to_values(x), y);
    const double r = objective.optimum_value - fx;
    best_regret = std::min(best_regret, r);
    return std::pair{y, r};
  };

  trace.initial_points = initial_design(domain, config.n_init, design_rng);
  for (const auto& x : trace.initial_points) trace.initial_values.push_back(evaluate(x).first);

  StructureSpace space = config.space;
  space.noise_variance = config.noise_variance;
  StructureParams structure;
  if (learns) {
    structure = config.initial_structure.value_or(StructureParams{DependencyGraph(domain.dim()), space.midpoints(), 0.5});
    structure.edge_prior = config.edge_prior;
  }
  DependencyGraph model_graph(domain.dim());
  KernelParams kernel{Eigen::VectorXd::Ones(domain.dim()), config.noise_variance};
  if (config.mode == BoMode::kOracle) {
    model_graph = truth->graph;
    kernel.lengthscales = truth->lengthscales;
  }

  auto learn = [&](int round, int t) {
    GibbsOptions opts;
    opts.max_evaluations = config.n_gibbs;
    opts.mode = config.mode == BoMode::kOverlap ? LearningMode::kOverlap : LearningMode::kNoOverlap;
    opts.seed = round_seed(config.seed, round);
    const GibbsTrace learned = gibbs_learn(obs, structure, space, opts);

    LearningRound snapshot;
    snapshot.round = round;
    snapshot.t = t;
    snapshot.evaluations = learned.likelihood_evaluation_count;
    StructureParams chosen = learned.best_params;
    double chosen_ll = learned.best_log_likelihood;
    if (!fits(chosen.graph, domain, config)) {
      snapshot.capped = true;
      auto ranked = learned.evaluated;
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const GibbsEntry& a, const GibbsEntry& b) { return a.log_likelihood > b.log_likelihood; });
      bool found = false;
      for (const auto& e : ranked) {
        if (fits(e.params.graph, domain, config)) {
          chosen = e.params;
          chosen_ll = e.log_likelihood;
          found = true;
          break;
        }
      }
      if (!found) {
        chosen.graph = DependencyGraph(domain.dim());
        chosen_ll = std::numeric_limits<double>::quiet_NaN();
      }
    }
    structure = chosen;
    model_graph = chosen.graph;
    kernel.lengthscales = space.lengthscales(chosen.lengthscale_indices);
    snapshot.graph = model_graph;
    snapshot.lengthscales = kernel.lengthscales;
    snapshot.log_likelihood = chosen_ll;
    if (truth) {
      const auto acc = graph_accuracy(model_graph, truth->graph);
      snapshot.cc = acc.cc;
      snapshot.cs = acc.cs;
    }
    trace.rounds.push_back(std::move(snapshot));
  };

  double regret_sum = 0.0;
  int round = 0;
  for (int t = 1; t <= config.n_iter; ++t) {
    if (learns && (t - 1) % config.n_cyc == 0) learn(round++, t);

    GridPoint x;
    if (config.mode == BoMode::kRandom) {
      x = uniform_point(domain, search_rng);
    } else {
      try {
        const AdditivePosterior posterior(obs, maximal_cliques(model_graph), kernel);
        const auto terms = ucb_tables(posterior, domain, config.beta(t), config.acquisition.max_table_size);
        const auto tree = build_junction_tree(triangulate(model_graph), model_graph, config.tree);
        const auto best = maximize_acquisition(tree, terms, domain, config.acquisition);
        trace.max_eval_exceeded += best.max_eval_exceeded;
        x = best.argmax;
      } catch (const CapacityError& e) {
        throw CapacityError("iteration " + std::to_string(t) + ": " + e.what());
      } catch (const NumericalError& e) {
        throw NumericalError("iteration " + std::to_string(t) + ": " + e.what());
      }
    }

    const auto [y, r] = evaluate(x);
    regret_sum += r;
    trace.iterations.push_back({t, std::move(x), y, r, best_regret, regret_sum / t});
  }
  return trace;
}

namespace {

std::pair<double, double> mean_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace

RegretAggregate aggregate_runs(std::span<const RegretTrace> traces) {
  if (traces.empty()) throw InvalidArgument("no traces to aggregate");
  const std::size_t len = traces[0].iterations.size();
  const std::size_t rounds = traces[0].rounds.size();
  for (const auto& tr : traces) {
    if (tr.iterations.size() != len) throw InvalidArgument("traces have different lengths");
    if (tr.rounds.size() != rounds) throw InvalidArgument("traces have different numbers of learning rounds");
  }
  RegretAggregate agg;
  const auto n = static_cast<Eigen::Index>(len);
  agg.simple_mean.resize(n);
  agg.simple_se.resize(n);
  agg.average_mean.resize(n);
  agg.average_se.resize(n);
  std::vector<double> s(traces.size()), a(traces.size());
  for (std::size_t i = 0; i < len; ++i) {
    agg.t.push_back(traces[0].iterations[i].t);
    for (std::size_t k = 0; k < traces.size(); ++k) {
      if (traces[k].iterations[i].t != agg.t.back()) throw InvalidArgument("traces are not aligned in t");
      s[k] = traces[k].iterations[i].simple_regret;
      a[k] = traces[k].iterations[i].average_regret;
    }
    std::tie(agg.simple_mean[i], agg.simple_se[i]) = mean_se(s);
    std::tie(agg.average_mean[i], agg.average_se[i]) = mean_se(a);
  }
  const auto m = static_cast<Eigen::Index>(rounds);
  agg.cc_mean = agg.cc_se = agg.cs_mean = agg.cs_se = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t r = 0; r < rounds; ++r) {
    agg.round_t.push_back(traces[0].rounds[r].t);
    std::vector<double> cc, cs;
    for (const auto& tr : traces) {
      if (tr.rounds[r].t != agg.round_t.back()) throw InvalidArgument("learning rounds are not aligned");
      if (tr.rounds[r].cc) cc.push_back(*tr.rounds[r].cc);
      if (tr.rounds[r].cs) cs.push_back(*tr.rounds[r].cs);
    }
    if (cc.size() == traces.size()) std::tie(agg.cc_mean[r], agg.cc_se[r]) = mean_se(cc);
    if (cs.size() == traces.size()) std::tie(agg.cs_mean[r], agg.cs_se[r]) = mean_se(cs);
  }
  return agg;
}

void write_trace_csv(std::ostream& out, const RegretTrace& trace, const Domain& domain) {
  out << 't';
  for (int v = 0; v < domain.dim(); ++v) out << ",x_" << v + 1;
  out << ",y,r,S,Ravg\n";
  for (const auto& it : trace.iterations) {
    out << it.t;
    for (int v = 0; v < domain.dim(); ++v) out << ',' << format_real(domain.value(v, it.x[v]));
    out << ',' << format_real(it.y) << ',' << format_real(it.regret) << ',' << format_real(it.simple_regret) << ','
        << format_real(it.average_regret) << '\n';
  }
}

void write_rounds_csv(std::ostream& out, const RegretTrace& trace) {
  out << "round,t,CC,CS\n";
  for (const auto& r : trace.rounds) {
    out << r.round << ',' << r.t << ',' << (r.cc ? format_real(*r.cc) : "") << ',' << (r.cs ? format_real(*r.cs) : "")
        << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const RegretAggregate& agg) {
  out << "t,S_mean,S_se,Ravg_mean,Ravg_se\n";
  for (std::size_t i = 0; i < agg.t.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out << agg.t[i] << ',' << format_real(agg.simple_mean[k]) << ',' << format_real(agg.simple_se[k]) << ','
        << format_real(agg.average_mean[k]) << ',' << format_real(agg.average_se[k]) << '\n';
  }
}

void write_aggregate_rounds_csv(std::ostream& out, const RegretAggregate& agg) {
  out << "round,t,CC_mean,CC_se,CS_mean,CS_se\n";
  for (std::size_t i = 0; i < agg.round_t.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    auto cell = [](double v) { return std::isnan(v) ? std::string() : format_real(v); };
    out << i << ',' << agg.round_t[i] << ',' << cell(agg.cc_mean[k]) << ',' << cell(agg.cc_se[k]) << ','
        << cell(agg.cs_mean[k]) << ',' << cell(agg.cs_se[k]) << '\n';
  }
}

}  // namespace addbo
