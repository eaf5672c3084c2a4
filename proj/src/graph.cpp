#include "lqcons/graph.hpp"

#include <algorithm>
#include <queue>

namespace lqcons {

namespace {

void insert_sorted(std::vector<int>& list, int value) {
  auto it = std::lower_bound(list.begin(), list.end(), value);
  if (it == list.end() || *it != value) list.insert(it, value);
}

std::vector<bool> reach(const std::vector<std::vector<int>>& lists, int start) {
  std::vector<bool> seen(lists.size(), false);
  std::queue<int> frontier;
  seen[static_cast<std::size_t>(start)] = true;
  frontier.push(start);
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (int v : lists[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        frontier.push(v);
      }
    }
  }
  return seen;
}

}  // namespace

bool UndirectedGraph::add_edge(int u, int v) {
  if (u == v || has_edge(u, v)) return false;
  insert_sorted(adjacency_[static_cast<std::size_t>(u)], v);
  insert_sorted(adjacency_[static_cast<std::size_t>(v)], u);
  return true;
}

bool UndirectedGraph::has_edge(int u, int v) const {
  const auto& list = neighbors(u);
  return std::binary_search(list.begin(), list.end(), v);
}

int UndirectedGraph::max_degree() const {
  int best = 0;
  for (int u = 0; u < size(); ++u) best = std::max(best, degree(u));
  return best;
}

std::size_t UndirectedGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : adjacency_) total += list.size();
  return total / 2;
}

std::vector<std::pair<int, int>> UndirectedGraph::edges() const {
  std::vector<std::pair<int, int>> result;
  for (int u = 0; u < size(); ++u)
    for (int v : neighbors(u))
      if (u < v) result.emplace_back(u, v);
  return result;
}

bool UndirectedGraph::connected() const {
  if (size() == 0) return true;
  auto seen = reach(adjacency_, 0);
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

Matrix UndirectedGraph::adjacency_matrix() const {
  Matrix a = Matrix::Zero(size(), size());
  for (int u = 0; u < size(); ++u)
    for (int v : neighbors(u)) a(u, v) = 1.0;
  return a;
}

void DirectedGraph::add_edge(int from, int to) {
  if (from == to) {
    loop_[static_cast<std::size_t>(from)] = true;
    return;
  }
  insert_sorted(out_[static_cast<std::size_t>(from)], to);
  insert_sorted(in_[static_cast<std::size_t>(to)], from);
}

bool DirectedGraph::has_edge(int from, int to) const {
  if (from == to) return has_loop(from);
  const auto& list = out(from);
  return std::binary_search(list.begin(), list.end(), to);
}

int DirectedGraph::max_out_degree() const {
  std::size_t best = 0;
  for (const auto& list : out_) best = std::max(best, list.size());
  return static_cast<int>(best);
}

int DirectedGraph::max_in_degree() const {
  std::size_t best = 0;
  for (const auto& list : in_) best = std::max(best, list.size());
  return static_cast<int>(best);
}

int DirectedGraph::first_unreachable() const {
  if (size() == 0) return -1;
  auto forward = reach(out_, 0);
  auto backward = reach(in_, 0);
  for (int u = 0; u < size(); ++u)
    if (!forward[static_cast<std::size_t>(u)] || !backward[static_cast<std::size_t>(u)]) return u;
  return -1;
}

UndirectedGraph DirectedGraph::symmetrized() const {
  UndirectedGraph g(size());
  for (int u = 0; u < size(); ++u)
    for (int v : out(u)) g.add_edge(u, v);
  return g;
}

}  // namespace lqcons
