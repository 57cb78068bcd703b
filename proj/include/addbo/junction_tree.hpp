#pragma once

#include "addbo/graph.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace addbo {

struct JunctionTreeOptions {
  // Largest clique allowed is max_treewidth + 1 variables.
  int max_treewidth = 8;
  // Defaults to the node holding the lowest variable index.
  std::optional<int> root;
};

// Rooted clique tree of a chordal graph. `terms` are the maximal cliques of
// the original (pre-triangulation) graph; each is owned by exactly one node.
struct JunctionTree {
  std::vector<Group> nodes;
  std::vector<std::pair<int, int>> edges;
  std::vector<Group> edge_separators;

  int root = 0;
  std::vector<int> parent;  // -1 at the root
  std::vector<std::vector<int>> children;
  std::vector<int> post_order;

  Decomposition terms;
  std::vector<int> term_node;
  std::vector<std::vector<int>> node_terms;

  int size() const { return static_cast<int>(nodes.size()); }
  // Intersection of a node with its parent (empty at the root).
  Group separator(int node) const;
  int width() const;
};

// Throws InvalidArgument if `tri.graph` is not chordal or does not contain
// `original`, CapacityError if a clique exceeds the treewidth cap.
JunctionTree build_junction_tree(const TriangulatedGraph& tri, const DependencyGraph& original,
                                 const JunctionTreeOptions& options = {});

// Same tree re-oriented at another root; term ownership is recomputed.
JunctionTree reroot(const JunctionTree& tree, int root);

bool satisfies_running_intersection(const JunctionTree& tree);

}  // namespace addbo
