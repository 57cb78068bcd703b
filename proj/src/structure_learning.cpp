#include "addbo/structure_learning.hpp"

#include "addbo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace addbo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Normalizes log-weights with log-sum-exp. All -inf yields an all-zero vector.
std::vector<double> softmax(const std::vector<double>& logw) {
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<double> p(logw.size(), 0.0);
  if (top == kNegInf) return p;
  double total = 0.0;
  for (std::size_t k = 0; k < logw.size(); ++k) total += p[k] = std::exp(logw[k] - top);
  for (double& v : p) v /= total;
  return p;
}

std::size_t sample_index(const std::vector<double>& probs, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last = k;
    acc += probs[k];
    if (u < acc) return k;
  }
  return last;
}

}  // namespace

StructureSpace StructureSpace::log_spaced(int dim, double lo, double hi, int count, double noise_variance) {
  if (dim < 1 || count < 1 || !(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("invalid lengthscale grid spec");
  std::vector<double> grid(count);
  for (int k = 0; k < count; ++k) {
    grid[k] = count == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (count - 1));
  }
  return {std::vector<std::vector<double>>(dim, grid), noise_variance};
}

Eigen::VectorXd StructureSpace::lengthscales(const std::vector<int>& indices) const {
  if (static_cast<int>(indices.size()) != dim()) throw InvalidArgument("lengthscale index vector has wrong size");
  Eigen::VectorXd l(dim());
  for (int v = 0; v < dim(); ++v) l[v] = lengthscale_grids[v].at(indices[v]);
  return l;
}

std::vector<int> StructureSpace::midpoints() const {
  std::vector<int> mid(dim());
  for (int v = 0; v < dim(); ++v) mid[v] = static_cast<int>(lengthscale_grids[v].size()) / 2;
  return mid;
}

void StructureParams::validate(const StructureSpace& space) const {
  if (graph.dim() != space.dim()) throw InvalidArgument("structure graph dimension does not match lengthscale grids");
  if (static_cast<int>(lengthscale_indices.size()) != space.dim()) {
    throw InvalidArgument("need one lengthscale index per variable");
  }
  for (int v = 0; v < space.dim(); ++v) {
    if (space.lengthscale_grids[v].empty()) throw InvalidArgument("empty lengthscale grid");
    if (lengthscale_indices[v] < 0 || lengthscale_indices[v] >= static_cast<int>(space.lengthscale_grids[v].size())) {
      throw InvalidArgument("lengthscale index out of range");
    }
  }
  if (!(edge_prior > 0.0 && edge_prior < 1.0)) throw InvalidArgument("edge prior must lie in (0, 1)");
}

StructureLikelihood::StructureLikelihood(const ObservationSet& obs, StructureSpace space)
    : obs_(obs), space_(std::move(space)) {
  if (obs_.size() < 1) throw InvalidArgument("structure learning needs at least one observation");
  if (obs_.dim() != space_.dim()) throw InvalidArgument("observation dimension does not match lengthscale grids");
  sq_dist_.reserve(obs_.dim());
  for (int v = 0; v < obs_.dim(); ++v) {
    const Eigen::ArrayXd col = obs_.points.col(v).array();
    sq_dist_.push_back(
        (col.replicate(1, obs_.size()) - col.transpose().replicate(obs_.size(), 1)).square().matrix());
  }
}

std::vector<std::uint8_t> StructureLikelihood::key(const DependencyGraph& graph, const std::vector<int>& indices) const {
  std::vector<std::uint8_t> k;
  for (int i = 0; i < graph.dim(); ++i)
    for (int j = i + 1; j < graph.dim(); ++j) k.push_back(graph.has_edge(i, j));
  for (int idx : indices) k.push_back(static_cast<std::uint8_t>(idx));
  return k;
}

double StructureLikelihood::compute(const DependencyGraph& graph, const std::vector<int>& indices) const {
  const Decomposition decomp = maximal_cliques(graph);
  const Eigen::VectorXd scales = group_scales(decomp);
  const Eigen::VectorXd l = space_.lengthscales(indices);
  const Eigen::Index n = obs_.size();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd quad(n, n);
  for (std::size_t i = 0; i < decomp.size(); ++i) {
    quad.setZero();
    for (int v : decomp[i]) quad += sq_dist_[v] / (l[v] * l[v]);
    gram.array() += scales[static_cast<Eigen::Index>(i)] * (-0.5 * quad.array()).exp();
  }
  gram.diagonal().array() += space_.noise_variance;
  try {
    const FactorizedGram factor(std::move(gram));
    const double fit = factor.half_solve(obs_.values).squaredNorm();
    return -0.5 * fit - 0.5 * factor.log_determinant() - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  } catch (const NumericalError&) {
    return kNegInf;
  }
}

double StructureLikelihood::operator()(const DependencyGraph& graph, const std::vector<int>& indices) {
  auto k = key(graph, indices);
  if (auto it = cache_.find(k); it != cache_.end()) return it->second;
  const double value = compute(graph, indices);
  ++evaluations_;
  cache_.emplace(std::move(k), value);
  return value;
}

bool StructureLikelihood::is_cached(const DependencyGraph& graph, const std::vector<int>& indices) const {
  return cache_.contains(key(graph, indices));
}

double edge_conditional(int i, int j, const StructureParams& params, StructureLikelihood& likelihood) {
  if (i == j || i < 0 || j < 0 || i >= params.graph.dim() || j >= params.graph.dim()) {
    throw InvalidArgument("invalid edge index");
  }
  DependencyGraph with = params.graph, without = params.graph;
  with.set_edge(i, j, true);
  without.set_edge(i, j, false);
  const double log1 = std::log(params.edge_prior) + likelihood(with, params.lengthscale_indices);
  const double log0 = std::log1p(-params.edge_prior) + likelihood(without, params.lengthscale_indices);
  if (log1 == kNegInf && log0 == kNegInf) return params.edge_prior;
  return softmax({log0, log1})[1];
}

double edge_conditional(int i, int j, const StructureParams& params, const ObservationSet& obs,
                        const StructureSpace& space) {
  params.validate(space);
  StructureLikelihood likelihood(obs, space);
  return edge_conditional(i, j, params, likelihood);
}

std::vector<double> lengthscale_conditional(int i, const StructureParams& params, StructureLikelihood& likelihood) {
  const auto& grid = likelihood.space().lengthscale_grids.at(i);
  if (grid.empty()) throw InvalidArgument("empty lengthscale grid");
  std::vector<double> logw(grid.size());
  auto indices = params.lengthscale_indices;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    indices[i] = static_cast<int>(k);
    logw[k] = likelihood(params.graph, indices);
  }
  auto probs = softmax(logw);
  if (std::all_of(probs.begin(), probs.end(), [](double p) { return p == 0.0; })) {
    probs[params.lengthscale_indices[i]] = 1.0;
  }
  return probs;
}

std::vector<double> lengthscale_conditional(int i, const StructureParams& params, const ObservationSet& obs,
                                            const StructureSpace& space) {
  params.validate(space);
  StructureLikelihood likelihood(obs, space);
  return lengthscale_conditional(i, params, likelihood);
}

Partition canonical_partition(const Partition& labels) {
  std::map<int, int> relabel;
  Partition out(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v) {
    auto [it, inserted] = relabel.try_emplace(labels[v], static_cast<int>(relabel.size()));
    out[v] = it->second;
  }
  return out;
}

Partition partition_of(const DependencyGraph& graph) {
  const int d = graph.dim();
  Partition label(d, -1);
  int next = 0;
  for (int s = 0; s < d; ++s) {
    if (label[s] >= 0) continue;
    std::vector<int> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : graph.neighbors(v)) {
        if (label[u] < 0) {
          label[u] = next;
          stack.push_back(u);
        }
      }
    }
    ++next;
  }
  return label;
}

DependencyGraph graph_of(const Partition& partition) {
  DependencyGraph g(static_cast<int>(partition.size()));
  for (std::size_t a = 0; a < partition.size(); ++a)
    for (std::size_t b = a + 1; b < partition.size(); ++b)
      if (partition[a] == partition[b]) g.set_edge(static_cast<int>(a), static_cast<int>(b));
  return g;
}

std::vector<Partition> no_overlap_candidates(int v, const Partition& partition) {
  if (v < 0 || v >= static_cast<int>(partition.size())) throw InvalidArgument("variable index out of range");
  std::vector<int> others;
  for (std::size_t u = 0; u < partition.size(); ++u) {
    if (static_cast<int>(u) != v) others.push_back(partition[u]);
  }
  std::sort(others.begin(), others.end());
  others.erase(std::unique(others.begin(), others.end()), others.end());
  std::vector<Partition> out;
  for (int label : others) {
    Partition p = partition;
    p[v] = label;
    out.push_back(canonical_partition(p));
  }
  Partition alone = partition;
  alone[v] = *std::max_element(partition.begin(), partition.end()) + 1;
  out.push_back(canonical_partition(alone));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> no_overlap_weights(int v, const Partition& partition, const std::vector<int>& lengthscale_indices,
                                       StructureLikelihood& likelihood) {
  const auto candidates = no_overlap_candidates(v, partition);
  std::vector<double> logw;
  logw.reserve(candidates.size());
  for (const auto& c : candidates) logw.push_back(likelihood(graph_of(c), lengthscale_indices));
  auto probs = softmax(logw);
  if (std::all_of(probs.begin(), probs.end(), [](double p) { return p == 0.0; })) {
    const auto current = canonical_partition(partition);
    for (std::size_t k = 0; k < candidates.size(); ++k) probs[k] = candidates[k] == current ? 1.0 : 0.0;
  }
  return probs;
}

Partition no_overlap_step(int v, const Partition& partition, const std::vector<int>& lengthscale_indices,
                          StructureLikelihood& likelihood, Rng& rng) {
  const auto candidates = no_overlap_candidates(v, partition);
  const auto probs = no_overlap_weights(v, partition, lengthscale_indices, likelihood);
  return candidates[sample_index(probs, rng)];
}

namespace {

// One coordinate of the sweep: either an edge, a no-overlap variable move or a lengthscale.
struct Coordinate {
  enum Kind { kEdge, kMove, kLengthscale } kind;
  int a = 0;
  int b = 0;
};

class GibbsChain {
 public:
  GibbsChain(const ObservationSet& obs, const StructureParams& init, const StructureSpace& space,
             const GibbsOptions& options)
      : likelihood_(obs, space), options_(options), state_(init), rng_(make_rng(options.seed, Stream::kStructureLearning)) {
    if (options.mode == LearningMode::kNoOverlap) {
      partition_ = canonical_partition(partition_of(init.graph));
      state_.graph = graph_of(partition_);
    }
    const int d = space.dim();
    if (options.mode == LearningMode::kOverlap) {
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) sweep_.push_back({Coordinate::kEdge, i, j});
    } else if (d > 1) {
      for (int v = 0; v < d; ++v) sweep_.push_back({Coordinate::kMove, v, 0});
    }
    if (options.learn_lengthscales) {
      for (int v = 0; v < d; ++v) sweep_.push_back({Coordinate::kLengthscale, v, 0});
    }
  }

  GibbsTrace run() {
    const long max_steps = options_.max_steps > 0 ? options_.max_steps : 10 * options_.max_evaluations;
    record_visit();
    while (!sweep_.empty()) {
      for (const auto& coord : sweep_) {
        const auto candidates = candidates_for(coord);
        long needed = 0;
        for (const auto& c : candidates) needed += !likelihood_.is_cached(c.graph, c.lengthscale_indices);
        if (likelihood_.evaluations() + needed > options_.max_evaluations || trace_.steps >= max_steps) {
          return finish();
        }
        std::vector<double> logw;
        for (const auto& c : candidates) logw.push_back(log_weight(coord, c));
        for (const auto& c : candidates) note_evaluated(c);
        auto probs = softmax(logw);
        std::size_t pick = 0;
        if (std::all_of(probs.begin(), probs.end(), [](double p) { return p == 0.0; })) {
          pick = static_cast<std::size_t>(std::find(candidates.begin(), candidates.end(), state_) - candidates.begin());
        } else {
          pick = sample_index(probs, rng_);
        }
        state_ = candidates[pick];
        if (options_.mode == LearningMode::kNoOverlap) partition_ = canonical_partition(partition_of(state_.graph));
        ++trace_.steps;
        record_visit();
      }
    }
    return finish();
  }

 private:
  std::vector<StructureParams> candidates_for(const Coordinate& coord) const {
    std::vector<StructureParams> out;
    switch (coord.kind) {
      case Coordinate::kEdge:
        for (bool present : {false, true}) {
          StructureParams p = state_;
          p.graph.set_edge(coord.a, coord.b, present);
          out.push_back(std::move(p));
        }
        break;
      case Coordinate::kMove:
        for (const auto& part : no_overlap_candidates(coord.a, partition_)) {
          StructureParams p = state_;
          p.graph = graph_of(part);
          out.push_back(std::move(p));
        }
        break;
      case Coordinate::kLengthscale:
        for (std::size_t k = 0; k < likelihood_.space().lengthscale_grids[coord.a].size(); ++k) {
          StructureParams p = state_;
          p.lengthscale_indices[coord.a] = static_cast<int>(k);
          out.push_back(std::move(p));
        }
        break;
    }
    return out;
  }

  double log_weight(const Coordinate& coord, const StructureParams& candidate) {
    double lw = likelihood_(candidate);
    if (coord.kind == Coordinate::kEdge) {
      lw += candidate.graph.has_edge(coord.a, coord.b) ? std::log(candidate.edge_prior)
                                                        : std::log1p(-candidate.edge_prior);
    }
    return lw;
  }

  void note_evaluated(const StructureParams& p) {
    // The likelihood cache tells us whether this state was already recorded.
    const double ll = likelihood_(p);
    for (const auto& e : trace_.evaluated) {
      if (e.params == p) return;
    }
    trace_.evaluated.push_back({p, ll});
    if (trace_.evaluated.size() == 1 || ll > trace_.best_log_likelihood) {
      trace_.best_log_likelihood = ll;
      trace_.best_params = p;
    }
  }

  void record_visit() {
    note_evaluated(state_);
    trace_.visited.push_back({state_, likelihood_(state_)});
  }

  GibbsTrace finish() {
    trace_.likelihood_evaluation_count = likelihood_.evaluations();
    return std::move(trace_);
  }

  StructureLikelihood likelihood_;
  GibbsOptions options_;
  StructureParams state_;
  Partition partition_;
  Rng rng_;
  std::vector<Coordinate> sweep_;
  GibbsTrace trace_;
};

}  // namespace

GibbsTrace gibbs_learn(const ObservationSet& obs, const StructureParams& init, const StructureSpace& space,
                       const GibbsOptions& options) {
  if (options.max_evaluations < 1) throw InvalidArgument("Gibbs budget must allow at least one evaluation");
  init.validate(space);
  return GibbsChain(obs, init, space, options).run();
}

}  // namespace addbo
