#include "addbo/acquisition.hpp"

#include "addbo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>
#include <sstream>

namespace addbo {

namespace {

// Linear map from a node's digit vector to a sub-table index.
struct Projection {
  std::vector<int> positions;
  std::vector<Eigen::Index> strides;

  Projection(const Group& node_vars, const SubGrid& sub) {
    for (std::size_t k = 0; k < sub.vars().size(); ++k) {
      const auto it = std::lower_bound(node_vars.begin(), node_vars.end(), sub.vars()[k]);
      if (it == node_vars.end() || *it != sub.vars()[k]) throw InconsistencyError("sub-table variable not in node");
      positions.push_back(static_cast<int>(it - node_vars.begin()));
      strides.push_back(sub.strides()[k]);
    }
  }

  Eigen::Index operator()(const std::vector<int>& digits) const {
    Eigen::Index idx = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) idx += strides[k] * digits[positions[k]];
    return idx;
  }
};

void advance(std::vector<int>& digits, const std::vector<int>& radices) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < radices[i]) return;
    digits[i] = 0;
  }
}

}  // namespace

AcquisitionResult maximize_acquisition(const JunctionTree& tree, std::span<const ComponentTable> terms,
                                       const Domain& domain, const AcquisitionOptions& options) {
  if (terms.size() != tree.terms.size()) {
    throw InconsistencyError("got " + std::to_string(terms.size()) + " acquisition terms for a tree with " +
                             std::to_string(tree.terms.size()));
  }
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (terms[t].group != tree.terms[t]) throw InconsistencyError("acquisition term groups do not match tree terms");
    if (static_cast<std::uint64_t>(terms[t].values.size()) != domain.cardinality(terms[t].group)) {
      throw InconsistencyError("acquisition term table has the wrong size");
    }
  }
  for (const auto& node : tree.nodes) {
    if (node.back() >= domain.dim()) throw InvalidArgument("junction tree variables exceed domain dimension");
    if (domain.cardinality(node) > static_cast<std::uint64_t>(options.max_table_size)) {
      throw CapacityError("clique table of " + std::to_string(domain.cardinality(node)) + " entries exceeds cap " +
                          std::to_string(options.max_table_size));
    }
  }

  const int n = tree.size();
  std::vector<SubGrid> node_grid;
  node_grid.reserve(n);
  for (const auto& node : tree.nodes) node_grid.emplace_back(domain, node);

  // Upward pass: message[c] is indexed by configurations of separator(c),
  // backpointer[c] holds the maximizing configuration of node c.
  std::vector<Eigen::VectorXd> message(n);
  std::vector<std::vector<Eigen::Index>> backpointer(n);
  std::vector<SubGrid> sep_grid;
  sep_grid.reserve(n);
  for (int c = 0; c < n; ++c) sep_grid.emplace_back(domain, tree.separator(c));

  AcquisitionResult result;
  Eigen::Index root_best = 0;
  double root_value = -std::numeric_limits<double>::infinity();

  for (int c : tree.post_order) {
    const Group& vars = tree.nodes[c];
    const SubGrid& grid = node_grid[c];
    result.entries_evaluated += grid.size();

    std::vector<std::pair<const Eigen::VectorXd*, Projection>> parts;
    for (int t : tree.node_terms[c]) {
      parts.emplace_back(&terms[t].values, Projection(vars, SubGrid(domain, terms[t].group)));
    }
    for (int child : tree.children[c]) parts.emplace_back(&message[child], Projection(vars, sep_grid[child]));

    const bool is_root = tree.parent[c] < 0;
    const Projection to_sep(vars, sep_grid[c]);
    if (!is_root) {
      message[c] = Eigen::VectorXd::Constant(sep_grid[c].size(), -std::numeric_limits<double>::infinity());
      backpointer[c].assign(static_cast<std::size_t>(sep_grid[c].size()), -1);
    }

    std::vector<int> digits(vars.size(), 0);
    for (Eigen::Index config = 0; config < grid.size(); ++config, advance(digits, grid.radices())) {
      double psi = 0.0;
      for (const auto& [table, proj] : parts) psi += (*table)[proj(digits)];
      if (is_root) {
        if (psi > root_value) {
          root_value = psi;
          root_best = config;
        }
      } else {
        const Eigen::Index s = to_sep(digits);
        if (psi > message[c][s] || backpointer[c][s] < 0) {
          message[c][s] = psi;
          backpointer[c][s] = config;
        }
      }
    }
  }

  // Downward pass.
  result.argmax.assign(domain.dim(), 0);
  std::vector<bool> assigned(domain.dim(), false);
  auto assign = [&](int c, Eigen::Index config) {
    std::vector<int> digits(tree.nodes[c].size());
    node_grid[c].decode(config, digits);
    for (std::size_t k = 0; k < digits.size(); ++k) {
      result.argmax[tree.nodes[c][k]] = digits[k];
      assigned[tree.nodes[c][k]] = true;
    }
  };
  assign(tree.root, root_best);
  for (auto it = tree.post_order.rbegin(); it != tree.post_order.rend(); ++it) {
    const int c = *it;
    if (c == tree.root) continue;
    const Eigen::Index s = sep_grid[c].encode(result.argmax);
    assign(c, backpointer[c][s]);
  }

  result.value = root_value;
  result.max_eval_exceeded = options.max_eval > 0 && result.entries_evaluated > options.max_eval;
  return result;
}

AcquisitionResult maximize_additive(const DependencyGraph& graph, std::span<const ComponentTable> terms,
                                    const Domain& domain, const AcquisitionOptions& options,
                                    const JunctionTreeOptions& tree_options) {
  const JunctionTree tree = build_junction_tree(triangulate(graph), graph, tree_options);
  return maximize_acquisition(tree, terms, domain, options);
}

double evaluate_terms(std::span<const ComponentTable> terms, const Domain& domain, const GridPoint& point) {
  double total = 0.0;
  for (const auto& term : terms) total += term.values[SubGrid(domain, term.group).encode(point)];
  return total;
}

BruteForceResult brute_force_maximize(const Domain& domain, const std::function<double(const GridPoint&)>& evaluator,
                                      std::uint64_t capacity) {
  const std::uint64_t total = domain.cardinality();
  if (total > capacity) {
    throw CapacityError("domain of " + std::to_string(total) + " points exceeds brute-force capacity " +
                        std::to_string(capacity));
  }
  std::vector<int> radices(domain.dim());
  for (int v = 0; v < domain.dim(); ++v) radices[v] = domain.size(v);
  GridPoint point(domain.dim(), 0);
  BruteForceResult best{point, -std::numeric_limits<double>::infinity()};
  for (std::uint64_t k = 0; k < total; ++k, advance(point, radices)) {
    const double v = evaluator(point);
    if (v > best.value) best = {point, v};
  }
  return best;
}

double component_ucb(const Moments& moments, double beta) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  return moments.mean + std::sqrt(beta) * std::sqrt(moments.variance);
}

double component_ucb(const AdditivePosterior& posterior, int group_index, const Eigen::Ref<const Eigen::VectorXd>& xq,
                     double beta) {
  return component_ucb(posterior.component(group_index, xq), beta);
}

std::vector<ComponentTable> ucb_tables(const AdditivePosterior& posterior, const Domain& domain, double beta,
                                       Eigen::Index max_table_size) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  const auto& decomp = posterior.decomposition();
  std::vector<ComponentTable> tables;
  tables.reserve(decomp.size());
  const double root_beta = std::sqrt(beta);
  for (std::size_t j = 0; j < decomp.size(); ++j) {
    if (domain.cardinality(decomp[j]) > static_cast<std::uint64_t>(max_table_size)) {
      throw CapacityError("component table exceeds cap " + std::to_string(max_table_size));
    }
    const Eigen::MatrixX2d moments = posterior.component_table(static_cast<int>(j), domain);
    tables.push_back({decomp[j], moments.col(0) + root_beta * moments.col(1).cwiseSqrt()});
  }
  return tables;
}

BetaSchedule BetaSchedule::parse(const std::string& text) {
  static const std::regex log_form(R"(^\s*([-+0-9.eE]+)\s*\*\s*log\(\s*([-+0-9.eE]+)\s*\*?\s*t\s*\)\s*$)");
  std::smatch m;
  try {
    if (std::regex_match(text, m, log_form)) {
      const double scale = std::stod(m[1]), factor = std::stod(m[2]);
      if (!(scale >= 0.0) || !(factor >= 1.0)) throw InvalidArgument("beta schedule needs scale >= 0 and factor >= 1");
      return logarithmic(scale, factor);
    }
    std::size_t used = 0;
    const double c = std::stod(text, &used);
    if (text.find_first_not_of(" \t", used) != std::string::npos) throw InvalidArgument("trailing characters");
    if (!(c >= 0.0)) throw InvalidArgument("constant beta must be nonnegative");
    return constant(c);
  } catch (const std::logic_error&) {
    throw InvalidArgument("cannot parse beta schedule '" + text + "'");
  }
}

double BetaSchedule::operator()(int t) const {
  if (t < 1) throw InvalidArgument("beta schedule is defined for t >= 1");
  if (factor_ == 0.0) return constant_;
  return scale_ * std::log(factor_ * t);
}

std::string BetaSchedule::describe() const {
  std::ostringstream os;
  if (factor_ == 0.0) {
    os << constant_;
  } else {
    os << scale_ << "*log(" << factor_ << "t)";
  }
  return os.str();
}

}  // namespace addbo
