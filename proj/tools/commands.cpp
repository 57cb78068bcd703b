#include "commands.hpp"

#include "addbo/analysis.hpp"
#include "addbo/csv.hpp"
#include "addbo/error.hpp"
#include "addbo/random.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace addbo::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::uint64_t run_seed(std::uint64_t seed, int run) { return seed * 1000003ull + static_cast<std::uint64_t>(run) + 1; }

KernelParams true_kernel(const ExperimentConfig& cfg, int dim) {
  return KernelParams::uniform(dim, cfg.true_lengthscale, cfg.noise_variance);
}

SyntheticOptions synthetic_options(const ExperimentConfig& cfg) {
  SyntheticOptions o;
  o.max_component_table = cfg.max_component_table;
  o.tree.max_treewidth = cfg.max_treewidth;
  o.acquisition.max_table_size = cfg.max_table_size;
  return o;
}

// Runs tasks 0..count-1 on up to worker_count() threads; rethrows the first failure.
template <typename Task>
void parallel_for(int count, Task task) {
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(count));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv("ADDBO_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_synth(const ExperimentConfig& cfg, std::ostream& log) {
  const DependencyGraph graph = cfg.true_graph();
  const Domain domain = cfg.domain();
  const KernelParams truth_kernel = true_kernel(cfg, graph.dim());
  const Truth truth{graph, truth_kernel.lengthscales};

  std::vector<SyntheticFunction> functions;
  const int n_functions = cfg.function_per_run ? cfg.runs : 1;
  for (int k = 0; k < n_functions; ++k) {
    functions.push_back(sample_synthetic(graph, truth_kernel, domain, cfg.seed + static_cast<std::uint64_t>(k),
                                         synthetic_options(cfg)));
  }
  {
    auto out = open_out(cfg.out / "true_graph.edges");
    write_edge_list(out, graph);
  }

  const int n_modes = static_cast<int>(cfg.modes.size());
  std::vector<RegretTrace> traces(static_cast<std::size_t>(n_modes) * cfg.runs);
  parallel_for(n_modes * cfg.runs, [&](int task) {
    const BoMode mode = cfg.modes[task / cfg.runs];
    const int run = task % cfg.runs;
    const SyntheticFunction& f = functions[cfg.function_per_run ? run : 0];
    RegretTrace trace = run_bo(cfg.bo_config(mode, run_seed(cfg.seed, run)), domain, Objective::from(f), truth);

    const fs::path dir = cfg.out / to_string(mode);
    const std::string stem = "run_" + std::to_string(run);
    auto csv = open_out(dir / (stem + ".csv"));
    write_trace_csv(csv, trace, domain);
    if (!trace.rounds.empty()) {
      auto rounds = open_out(dir / (stem + "_rounds.csv"));
      write_rounds_csv(rounds, trace);
      for (const auto& r : trace.rounds) {
        auto edges = open_out(dir / (stem + "_round_" + std::to_string(r.round) + ".edges"));
        write_structure(edges, r.graph, r.lengthscales);
      }
    }
    traces[task] = std::move(trace);
  });

  for (int m = 0; m < n_modes; ++m) {
    const std::span<const RegretTrace> runs(traces.data() + static_cast<std::ptrdiff_t>(m) * cfg.runs, cfg.runs);
    const RegretAggregate agg = aggregate_runs(runs);
    const std::string name = to_string(cfg.modes[m]);
    auto out = open_out(cfg.out / (name + "_aggregate.csv"));
    write_aggregate_csv(out, agg);
    if (!agg.round_t.empty()) {
      auto rounds = open_out(cfg.out / (name + "_aggregate_rounds.csv"));
      write_aggregate_rounds_csv(rounds, agg);
    }
    int capped = 0, over_budget = 0;
    for (const auto& tr : runs) {
      for (const auto& r : tr.rounds) capped += r.capped;
      over_budget += tr.max_eval_exceeded;
    }
    log << name << ": final S mean " << format_real(agg.simple_mean[agg.simple_mean.size() - 1]) << " (se "
        << format_real(agg.simple_se[agg.simple_se.size() - 1]) << ")";
    if (capped) log << ", " << capped << " learning rounds capped by treewidth";
    if (over_budget) log << ", max_eval exceeded in " << over_budget << " iterations";
    log << '\n';
  }
  return kOk;
}

int cmd_learn(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.data.empty()) throw InvalidArgument("learn needs a data file (--data or 'data = <path>')");
  std::ifstream in(cfg.data);
  if (!in) throw InvalidArgument("cannot open data file " + cfg.data.string());
  const ObservationSet obs = read_observations_csv(in);

  const StructureSpace space = StructureSpace::log_spaced(obs.dim(), cfg.lengthscale_min, cfg.lengthscale_max,
                                                          cfg.lengthscale_count, cfg.noise_variance);
  const StructureParams init{DependencyGraph(obs.dim()), space.midpoints(), cfg.edge_prior};
  GibbsOptions opts;
  opts.max_evaluations = cfg.n_gibbs;
  opts.seed = cfg.seed;
  opts.mode = cfg.modes.front() == BoMode::kNoOverlap ? LearningMode::kNoOverlap : LearningMode::kOverlap;
  const GibbsTrace trace = gibbs_learn(obs, init, space, opts);

  {
    auto out = open_out(cfg.out / "learned.edges");
    write_structure(out, trace.best_params.graph, space.lengthscales(trace.best_params.lengthscale_indices));
  }
  auto out = open_out(cfg.out / "gibbs_trace.csv");
  out << "step,log_likelihood,edges\n";
  for (std::size_t s = 0; s < trace.visited.size(); ++s) {
    std::string edges;
    for (auto [i, j] : trace.visited[s].params.graph.edges()) {
      if (!edges.empty()) edges += ' ';
      edges += std::to_string(i + 1) + '-' + std::to_string(j + 1);
    }
    out << s << ',' << format_real(trace.visited[s].log_likelihood) << ',' << edges << '\n';
  }
  log << "learned " << trace.best_params.graph.num_edges() << " edges, log-likelihood "
      << format_real(trace.best_log_likelihood) << " after " << trace.likelihood_evaluation_count << " evaluations\n";
  return kOk;
}

int cmd_analyze(const ExperimentConfig& cfg, std::ostream& log) {
  const DependencyGraph graph = cfg.true_graph();
  const Domain domain = cfg.domain();
  const KernelParams kernel = true_kernel(cfg, graph.dim());
  const SyntheticFunction f = sample_synthetic(graph, kernel, domain, cfg.seed, synthetic_options(cfg));

  Rng rng = make_rng(cfg.seed, Stream::kAnalysis);
  Rng noise = make_rng(cfg.seed, Stream::kObservationNoise);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_point = [&] {
    GridPoint p(domain.dim());
    for (int v = 0; v < domain.dim(); ++v) p[v] = std::uniform_int_distribution<int>(0, domain.size(v) - 1)(rng);
    return p;
  };
  ObservationSet obs(domain.dim());
  for (int k = 0; k < cfg.n_obs; ++k) {
    const GridPoint p = random_point();
    obs.add(domain.to_values(p), f(p) + std::sqrt(cfg.noise_variance) * normal(noise));
  }
  const AdditivePosterior posterior(obs, maximal_cliques(graph), kernel);
  const VarianceGapScan scan = variance_gap_scan(posterior, domain, cfg.scan_points, cfg.seed + 1);
  {
    auto out = open_out(cfg.out / "variance_gap.csv");
    write_variance_gap_csv(out, scan);
  }

  if (domain.cardinality() < static_cast<std::uint64_t>(cfg.info_gain_candidates)) {
    throw InvalidArgument("info_gain_candidates exceeds the domain size");
  }
  std::set<GridPoint> chosen;
  Eigen::MatrixXd candidates(cfg.info_gain_candidates, domain.dim());
  for (int k = 0; k < cfg.info_gain_candidates;) {
    const GridPoint p = random_point();
    if (!chosen.insert(p).second) continue;
    candidates.row(k++) = domain.to_values(p).transpose();
  }
  const InfoGainResult gain = greedy_info_gain(candidates, cfg.info_gain_T, maximal_cliques(graph), kernel);
  {
    auto out = open_out(cfg.out / "info_gain.csv");
    write_info_gain_csv(out, gain);
  }
  int diverged = 0;
  for (const auto& s : scan.samples) diverged += s.ratio_diverged;
  log << "variance scan: " << scan.samples.size() << " points, " << scan.violations << " violations, " << diverged
      << " diverged ratios; info gain at T=" << cfg.info_gain_T << ": " << format_real(gain.gains.back()) << '\n';
  return scan.violations > 0 ? kInvariantViolation : kOk;
}

int run_command(const std::string& command, const Overrides& overrides, std::ostream& log) {
  try {
    ExperimentConfig cfg = overrides.config ? load_config(*overrides.config) : ExperimentConfig{};
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.out) cfg.out = *overrides.out;
    if (overrides.runs) cfg.runs = *overrides.runs;
    if (overrides.modes) cfg.modes = parse_mode_list(*overrides.modes);
    if (overrides.data) cfg.data = *overrides.data;
    cfg.validate();
    if (command == "synth") return cmd_synth(cfg, log);
    if (command == "learn") return cmd_learn(cfg, log);
    if (command == "analyze") return cmd_analyze(cfg, log);
    log << "unknown command '" << command << "'\n";
    return kConfigError;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const CapacityError& e) {
    log << "capacity error: " << e.what() << '\n';
    return kCapacityError;
  } catch (const NumericalError& e) {
    log << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace addbo::cli
