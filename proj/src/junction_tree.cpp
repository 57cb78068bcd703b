#include "addbo/junction_tree.hpp"

#include "addbo/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>

namespace addbo {

namespace {

Group intersect(const Group& a, const Group& b) {
  Group out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const Group& small, const Group& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

int find_root(std::vector<int>& uf, int v) {
  while (uf[v] != v) v = uf[v] = uf[uf[v]];
  return v;
}

// Fills parent/children/post_order from `edges` and `root`, then assigns
// every term to the first node in post-order that contains it.
void orient(JunctionTree& tree) {
  const int n = tree.size();
  std::vector<std::vector<int>> adjacent(n);
  for (auto [a, b] : tree.edges) {
    adjacent[a].push_back(b);
    adjacent[b].push_back(a);
  }
  for (auto& a : adjacent) std::sort(a.begin(), a.end());

  tree.parent.assign(n, -1);
  tree.children.assign(n, {});
  tree.post_order.clear();
  std::vector<bool> seen(n, false);
  // Iterative DFS producing post-order with children in ascending index order.
  std::vector<std::pair<int, std::size_t>> stack{{tree.root, 0}};
  seen[tree.root] = true;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < adjacent[node].size()) {
      const int child = adjacent[node][next++];
      if (!seen[child]) {
        seen[child] = true;
        tree.parent[child] = node;
        tree.children[node].push_back(child);
        stack.emplace_back(child, 0);
      }
    } else {
      tree.post_order.push_back(node);
      stack.pop_back();
    }
  }

  tree.term_node.assign(tree.terms.size(), -1);
  tree.node_terms.assign(n, {});
  for (std::size_t t = 0; t < tree.terms.size(); ++t) {
    for (int node : tree.post_order) {
      if (is_subset(tree.terms[t], tree.nodes[node])) {
        tree.term_node[t] = node;
        tree.node_terms[node].push_back(static_cast<int>(t));
        break;
      }
    }
    if (tree.term_node[t] < 0) throw InconsistencyError("term not contained in any junction-tree node");
  }
}

}  // namespace

Group JunctionTree::separator(int node) const {
  return parent[node] < 0 ? Group{} : intersect(nodes[node], nodes[parent[node]]);
}

int JunctionTree::width() const {
  std::size_t w = 0;
  for (const auto& c : nodes) w = std::max(w, c.size());
  return static_cast<int>(w) - 1;
}

JunctionTree build_junction_tree(const TriangulatedGraph& tri, const DependencyGraph& original,
                                 const JunctionTreeOptions& options) {
  if (tri.graph.dim() != original.dim()) throw InvalidArgument("triangulated graph dimension mismatch");
  if (!is_chordal(tri.graph)) throw InvalidArgument("junction tree requires a chordal graph");
  for (auto [i, j] : original.edges()) {
    if (!tri.graph.has_edge(i, j)) throw InvalidArgument("triangulated graph must contain the original edges");
  }

  JunctionTree tree;
  tree.nodes = maximal_cliques(tri.graph);
  if (tree.width() > options.max_treewidth) {
    throw CapacityError("junction tree width " + std::to_string(tree.width()) + " exceeds cap " +
                        std::to_string(options.max_treewidth));
  }
  const int n = tree.size();

  // Kruskal on the clique graph: heaviest separators first, ties by lowest
  // clique indices. Zero-weight edges join disconnected components.
  std::vector<std::tuple<int, int, int>> candidates;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      candidates.emplace_back(-static_cast<int>(intersect(tree.nodes[a], tree.nodes[b]).size()), a, b);
  std::sort(candidates.begin(), candidates.end());
  std::vector<int> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  for (auto [neg_w, a, b] : candidates) {
    const int ra = find_root(uf, a), rb = find_root(uf, b);
    if (ra == rb) continue;
    uf[ra] = rb;
    tree.edges.emplace_back(a, b);
    tree.edge_separators.push_back(intersect(tree.nodes[a], tree.nodes[b]));
    if (static_cast<int>(tree.edges.size()) == n - 1) break;
  }

  if (options.root) {
    if (*options.root < 0 || *options.root >= n) throw InvalidArgument("root index out of range");
    tree.root = *options.root;
  } else {
    tree.root = 0;
    for (int c = 0; c < n; ++c) {
      if (tree.nodes[c].front() < tree.nodes[tree.root].front()) tree.root = c;
    }
  }
  tree.terms = maximal_cliques(original);
  orient(tree);
  return tree;
}

JunctionTree reroot(const JunctionTree& tree, int root) {
  if (root < 0 || root >= tree.size()) throw InvalidArgument("root index out of range");
  JunctionTree out = tree;
  out.root = root;
  orient(out);
  return out;
}

bool satisfies_running_intersection(const JunctionTree& tree) {
  const int n = tree.size();
  if (static_cast<int>(tree.edges.size()) != n - 1) return false;
  int max_var = -1;
  for (const auto& c : tree.nodes) max_var = std::max(max_var, c.back());
  for (int v = 0; v <= max_var; ++v) {
    // Nodes containing v must induce a connected subtree: count holders and
    // edges between holders; a forest on k nodes is connected iff it has k-1 edges.
    int holders = 0, links = 0;
    std::vector<bool> holds(n);
    for (int c = 0; c < n; ++c) {
      holds[c] = std::binary_search(tree.nodes[c].begin(), tree.nodes[c].end(), v);
      holders += holds[c];
    }
    for (auto [a, b] : tree.edges) links += holds[a] && holds[b];
    if (holders > 0 && links != holders - 1) return false;
  }
  return true;
}

}  // namespace addbo
