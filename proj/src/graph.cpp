#include "addbo/graph.hpp"

#include "addbo/error.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace addbo {

DependencyGraph::DependencyGraph(int dim) : dim_(dim), adj_(static_cast<std::size_t>(dim) * dim, 0) {
  if (dim < 1 || dim > kMaxVertices) throw InvalidArgument("graph dimension must be in [1, 64]");
}

std::size_t DependencyGraph::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_) throw InvalidArgument("vertex index out of range");
  return static_cast<std::size_t>(i) * dim_ + j;
}

void DependencyGraph::set_edge(int i, int j, bool present) {
  if (i == j) throw InvalidArgument("self loops are not allowed");
  adj_[index(i, j)] = present;
  adj_[index(j, i)] = present;
}

int DependencyGraph::num_edges() const {
  int count = 0;
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j) count += has_edge(i, j);
  return count;
}

std::vector<std::pair<int, int>> DependencyGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      if (has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

std::vector<int> DependencyGraph::neighbors(int v) const {
  std::vector<int> out;
  for (int u = 0; u < dim_; ++u)
    if (u != v && has_edge(v, u)) out.push_back(u);
  return out;
}

std::uint64_t DependencyGraph::neighbor_mask(int v) const {
  std::uint64_t mask = 0;
  for (int u = 0; u < dim_; ++u)
    if (u != v && has_edge(v, u)) mask |= std::uint64_t{1} << u;
  return mask;
}

DependencyGraph DependencyGraph::complete(int dim) {
  DependencyGraph g(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) g.set_edge(i, j);
  return g;
}

DependencyGraph DependencyGraph::star(int dim) {
  DependencyGraph g(dim);
  for (int j = 1; j < dim; ++j) g.set_edge(0, j);
  return g;
}

DependencyGraph DependencyGraph::lattice(int rows, int cols) {
  DependencyGraph g(rows * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) g.set_edge(v, v + 1);
      if (r + 1 < rows) g.set_edge(v, v + cols);
    }
  }
  return g;
}

DependencyGraph DependencyGraph::chain(int dim) {
  DependencyGraph g(dim);
  for (int j = 1; j < dim; ++j) g.set_edge(j - 1, j);
  return g;
}

DependencyGraph DependencyGraph::from_groups(int dim, const Decomposition& groups) {
  DependencyGraph g(dim);
  for (const auto& group : groups)
    for (std::size_t a = 0; a < group.size(); ++a)
      for (std::size_t b = a + 1; b < group.size(); ++b) g.set_edge(group[a], group[b]);
  return g;
}

namespace {

Group mask_to_group(std::uint64_t mask) {
  Group g;
  while (mask) {
    const int v = std::countr_zero(mask);
    g.push_back(v);
    mask &= mask - 1;
  }
  return g;
}

// Bron-Kerbosch with Tomita pivoting over bitsets.
void bron_kerbosch(const std::vector<std::uint64_t>& nbr, std::uint64_t r, std::uint64_t p, std::uint64_t x,
                   std::vector<std::uint64_t>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  int pivot = -1;
  int best = -1;
  for (std::uint64_t px = p | x; px; px &= px - 1) {
    const int u = std::countr_zero(px);
    const int cover = std::popcount(p & nbr[u]);
    if (cover > best) {
      best = cover;
      pivot = u;
    }
  }
  for (std::uint64_t cand = p & ~nbr[pivot]; cand; cand &= cand - 1) {
    const int v = std::countr_zero(cand);
    const std::uint64_t bit = std::uint64_t{1} << v;
    bron_kerbosch(nbr, r | bit, p & nbr[v], x & nbr[v], out);
    p &= ~bit;
    x |= bit;
  }
}

}  // namespace

Decomposition maximal_cliques(const DependencyGraph& graph) {
  const int d = graph.dim();
  std::vector<std::uint64_t> nbr(d);
  for (int v = 0; v < d; ++v) nbr[v] = graph.neighbor_mask(v);
  const std::uint64_t all = d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
  std::vector<std::uint64_t> masks;
  bron_kerbosch(nbr, 0, all, 0, masks);
  Decomposition cliques;
  cliques.reserve(masks.size());
  for (auto m : masks) cliques.push_back(mask_to_group(m));
  std::sort(cliques.begin(), cliques.end());
  return cliques;
}

bool is_chordal(const DependencyGraph& graph) {
  // Maximum cardinality search, then check the reverse visit order is a
  // perfect elimination ordering.
  const int d = graph.dim();
  std::vector<int> weight(d, 0), order;
  std::vector<bool> visited(d, false);
  order.reserve(d);
  for (int step = 0; step < d; ++step) {
    int pick = -1;
    for (int v = 0; v < d; ++v)
      if (!visited[v] && (pick < 0 || weight[v] > weight[pick])) pick = v;
    visited[pick] = true;
    order.push_back(pick);
    for (int u : graph.neighbors(pick))
      if (!visited[u]) ++weight[u];
  }
  std::vector<int> position(d);
  for (int k = 0; k < d; ++k) position[order[k]] = k;
  for (int k = 0; k < d; ++k) {
    const int v = order[k];
    // Earlier-visited neighbours of v must form a clique; it suffices that
    // they are all adjacent to the latest of them.
    int latest = -1;
    std::vector<int> earlier;
    for (int u : graph.neighbors(v)) {
      if (position[u] < k) {
        earlier.push_back(u);
        if (latest < 0 || position[u] > position[latest]) latest = u;
      }
    }
    for (int u : earlier)
      if (u != latest && !graph.has_edge(u, latest)) return false;
  }
  return true;
}

TriangulatedGraph triangulate(const DependencyGraph& graph) {
  const int d = graph.dim();
  TriangulatedGraph out{graph, {}, {}};
  DependencyGraph work = graph;
  std::vector<bool> eliminated(d, false);
  for (int step = 0; step < d; ++step) {
    int best = -1;
    int best_fill = std::numeric_limits<int>::max();
    for (int v = 0; v < d; ++v) {
      if (eliminated[v]) continue;
      std::vector<int> nb;
      for (int u : work.neighbors(v))
        if (!eliminated[u]) nb.push_back(u);
      int fill = 0;
      for (std::size_t a = 0; a < nb.size(); ++a)
        for (std::size_t b = a + 1; b < nb.size(); ++b) fill += !work.has_edge(nb[a], nb[b]);
      if (fill < best_fill) {
        best_fill = fill;
        best = v;
      }
    }
    std::vector<int> nb;
    for (int u : work.neighbors(best))
      if (!eliminated[u]) nb.push_back(u);
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if (!work.has_edge(nb[a], nb[b])) {
          work.set_edge(nb[a], nb[b]);
          out.graph.set_edge(nb[a], nb[b]);
          out.fill_edges.emplace_back(std::min(nb[a], nb[b]), std::max(nb[a], nb[b]));
        }
      }
    }
    eliminated[best] = true;
    out.elimination_order.push_back(best);
  }
  std::sort(out.fill_edges.begin(), out.fill_edges.end());
  return out;
}

int elimination_width(const DependencyGraph& graph, const std::vector<int>& order) {
  const int d = graph.dim();
  std::vector<std::uint64_t> nbr(d);
  for (int v = 0; v < d; ++v) nbr[v] = graph.neighbor_mask(v);
  std::uint64_t alive = d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
  int width = 0;
  for (int v : order) {
    const std::uint64_t nb = nbr[v] & alive;
    width = std::max(width, std::popcount(nb) + 1);
    for (std::uint64_t m = nb; m; m &= m - 1) {
      const int u = std::countr_zero(m);
      nbr[u] |= nb & ~(std::uint64_t{1} << u);
    }
    alive &= ~(std::uint64_t{1} << v);
  }
  return width;
}

void write_edge_list(std::ostream& out, const DependencyGraph& graph) {
  out << "D=" << graph.dim() << '\n';
  for (auto [i, j] : graph.edges()) out << i + 1 << ' ' << j + 1 << '\n';
}

namespace {

DependencyGraph parse_edges(std::istream& in, std::optional<Eigen::VectorXd>* lengthscales) {
  std::string line;
  int line_no = 0;
  std::optional<DependencyGraph> graph;
  while (std::getline(in, line)) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    if (!graph) {
      if (line.rfind("D=", 0) != 0) throw ParseError("expected header 'D=<int>'", line_no);
      int d = 0;
      std::istringstream hs(line.substr(2));
      if (!(hs >> d) || d < 1 || d > DependencyGraph::kMaxVertices) throw ParseError("invalid dimension", line_no);
      graph.emplace(d);
      continue;
    }
    if (line[0] == 'l') {
      if (!lengthscales) throw ParseError("unexpected lengthscale line", line_no);
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("expected 'l = v1 ... vD'", line_no);
      std::istringstream ls(line.substr(eq + 1));
      std::vector<double> vals;
      double v;
      while (ls >> v) vals.push_back(v);
      if (!ls.eof() || static_cast<int>(vals.size()) != graph->dim()) {
        throw ParseError("lengthscale line must hold D reals", line_no);
      }
      *lengthscales = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
      continue;
    }
    std::istringstream es(line);
    int i = 0, j = 0;
    std::string rest;
    if (!(es >> i >> j) || (es >> rest)) throw ParseError("expected 'i j'", line_no);
    if (i < 1 || j < 1 || i > graph->dim() || j > graph->dim() || i == j) {
      throw ParseError("edge endpoint out of range", line_no);
    }
    graph->set_edge(i - 1, j - 1);
  }
  if (!graph) throw ParseError("missing 'D=<int>' header", std::max(line_no, 1));
  return *graph;
}

}  // namespace

DependencyGraph read_edge_list(std::istream& in) { return parse_edges(in, nullptr); }

void write_structure(std::ostream& out, const DependencyGraph& graph, const Eigen::VectorXd& lengthscales) {
  write_edge_list(out, graph);
  out << "l =";
  char buf[32];
  for (Eigen::Index k = 0; k < lengthscales.size(); ++k) {
    std::snprintf(buf, sizeof buf, " %.17g", lengthscales[k]);
    out << buf;
  }
  out << '\n';
}

std::pair<DependencyGraph, std::optional<Eigen::VectorXd>> read_structure(std::istream& in) {
  std::optional<Eigen::VectorXd> ls;
  auto g = parse_edges(in, &ls);
  return {std::move(g), std::move(ls)};
}

}  // namespace addbo
