#pragma once

#include "addbo/domain.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace addbo {

// Additive decomposition: one group per maximal clique of a dependency graph.
using Decomposition = std::vector<Group>;

// Undirected simple graph over D variables (0-based). D is limited to 64 so
// vertex sets fit a machine word during clique enumeration.
class DependencyGraph {
 public:
  static constexpr int kMaxVertices = 64;

  DependencyGraph() = default;
  explicit DependencyGraph(int dim);

  int dim() const { return dim_; }
  bool has_edge(int i, int j) const { return adj_[index(i, j)] != 0; }
  void set_edge(int i, int j, bool present = true);

  int num_edges() const;
  int num_non_edges() const { return dim_ * (dim_ - 1) / 2 - num_edges(); }

  // Edges (i, j) with i < j in lexicographic order.
  std::vector<std::pair<int, int>> edges() const;
  std::vector<int> neighbors(int v) const;
  std::uint64_t neighbor_mask(int v) const;

  bool operator==(const DependencyGraph& other) const = default;

  static DependencyGraph complete(int dim);
  // Vertex 0 joined to every other vertex.
  static DependencyGraph star(int dim);
  // rows x cols lattice, vertices numbered row-major.
  static DependencyGraph lattice(int rows, int cols);
  static DependencyGraph chain(int dim);
  // Graph whose maximal cliques are exactly the given groups' closures.
  static DependencyGraph from_groups(int dim, const Decomposition& groups);

 private:
  std::size_t index(int i, int j) const;

  int dim_ = 0;
  std::vector<std::uint8_t> adj_;
};

// All maximal cliques, each sorted, list sorted lexicographically; isolated
// vertices appear as singletons.
Decomposition maximal_cliques(const DependencyGraph& graph);

bool is_chordal(const DependencyGraph& graph);

struct TriangulatedGraph {
  DependencyGraph graph;
  std::vector<std::pair<int, int>> fill_edges;
  std::vector<int> elimination_order;
};

// Min-fill elimination; ties go to the lowest vertex index.
TriangulatedGraph triangulate(const DependencyGraph& graph);

// Size of the largest clique produced by eliminating vertices in `order`.
int elimination_width(const DependencyGraph& graph, const std::vector<int>& order);

// Plain-text edge list: "D=<int>" header then one "i j" pair (1-indexed) per line.
void write_edge_list(std::ostream& out, const DependencyGraph& graph);
DependencyGraph read_edge_list(std::istream& in);

// Edge list followed by "l = v1 ... vD".
void write_structure(std::ostream& out, const DependencyGraph& graph, const Eigen::VectorXd& lengthscales);
std::pair<DependencyGraph, std::optional<Eigen::VectorXd>> read_structure(std::istream& in);

}  // namespace addbo
