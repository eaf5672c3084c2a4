#pragma once

#include <utility>
#include <vector>

#include "lqcons/types.hpp"

namespace lqcons {

/// Simple undirected graph on nodes 0..n-1 without self loops or parallel edges.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(int n) : adjacency_(static_cast<std::size_t>(n)) {}

  int size() const { return static_cast<int>(adjacency_.size()); }

  /// Inserts {u,v}; self loops and duplicates are ignored. Returns true if added.
  bool add_edge(int u, int v);
  bool has_edge(int u, int v) const;

  const std::vector<int>& neighbors(int u) const { return adjacency_[static_cast<std::size_t>(u)]; }
  int degree(int u) const { return static_cast<int>(neighbors(u).size()); }
  int max_degree() const;
  std::size_t edge_count() const;

  /// Edges as (u, v) with u < v, in lexicographic order.
  std::vector<std::pair<int, int>> edges() const;

  bool connected() const;

  /// 0/1 symmetric matrix with zero diagonal.
  Matrix adjacency_matrix() const;

  friend bool operator==(const UndirectedGraph&, const UndirectedGraph&) = default;

 private:
  std::vector<std::vector<int>> adjacency_;  // each list sorted
};

/// Directed graph; self loops are stored as a flag per node, not as edges.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(int n)
      : out_(static_cast<std::size_t>(n)), in_(static_cast<std::size_t>(n)), loop_(static_cast<std::size_t>(n), false) {}

  int size() const { return static_cast<int>(out_.size()); }

  void add_edge(int from, int to);
  bool has_edge(int from, int to) const;
  bool has_loop(int u) const { return loop_[static_cast<std::size_t>(u)]; }

  const std::vector<int>& out(int u) const { return out_[static_cast<std::size_t>(u)]; }
  const std::vector<int>& in(int u) const { return in_[static_cast<std::size_t>(u)]; }

  int max_out_degree() const;
  int max_in_degree() const;

  /// First node that is not mutually reachable with node 0, or -1 if strongly connected.
  int first_unreachable() const;

  UndirectedGraph symmetrized() const;

 private:
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<bool> loop_;
};

}  // namespace lqcons
