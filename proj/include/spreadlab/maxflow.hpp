#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

namespace spreadlab {

/// Dinic's algorithm. Cap is an integer type (exact) or double; residual
/// capacities at or below `epsilon` count as saturated.
template <class Cap>
class MaxFlow {
 public:
  explicit MaxFlow(int nodes, Cap epsilon = Cap{}) : graph_(static_cast<std::size_t>(nodes)), epsilon_(epsilon) {}

  int add_edge(int from, int to, Cap capacity) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({to, capacity, capacity});
    graph_[static_cast<std::size_t>(from)].push_back(id);
    edges_.push_back({from, Cap{}, Cap{}});
    graph_[static_cast<std::size_t>(to)].push_back(id + 1);
    return id;
  }

  Cap solve(int source, int sink) {
    Cap total{};
    while (build_levels(source, sink)) {
      next_.assign(graph_.size(), 0);
      while (true) {
        Cap pushed = augment(source, sink, std::numeric_limits<Cap>::max());
        if (!(pushed > epsilon_)) break;
        total += pushed;
      }
    }
    return total;
  }

  Cap flow(int edge) const {
    const Edge& e = edges_[static_cast<std::size_t>(edge)];
    return e.capacity - e.residual;
  }

  /// Nodes reachable from `source` in the residual graph: the source side of a
  /// minimum cut once solve() has run.
  std::vector<bool> source_side(int source) const {
    std::vector<bool> seen(graph_.size(), false);
    std::vector<int> stack{source};
    seen[static_cast<std::size_t>(source)] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int id : graph_[static_cast<std::size_t>(u)]) {
        const Edge& e = edges_[static_cast<std::size_t>(id)];
        if (e.residual > epsilon_ && !seen[static_cast<std::size_t>(e.to)]) {
          seen[static_cast<std::size_t>(e.to)] = true;
          stack.push_back(e.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    int to;
    Cap residual;
    Cap capacity;
  };

  bool build_levels(int source, int sink) {
    level_.assign(graph_.size(), -1);
    std::queue<int> queue;
    queue.push(source);
    level_[static_cast<std::size_t>(source)] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop();
      for (int id : graph_[static_cast<std::size_t>(u)]) {
        const Edge& e = edges_[static_cast<std::size_t>(id)];
        if (e.residual > epsilon_ && level_[static_cast<std::size_t>(e.to)] < 0) {
          level_[static_cast<std::size_t>(e.to)] = level_[static_cast<std::size_t>(u)] + 1;
          queue.push(e.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
  }

  // Blocking-flow DFS. Recursion depth is the level of the sink.
  Cap augment(int u, int sink, Cap limit) {
    if (u == sink) return limit;
    auto& adj = graph_[static_cast<std::size_t>(u)];
    for (std::size_t& i = next_[static_cast<std::size_t>(u)]; i < adj.size(); ++i) {
      const int id = adj[i];
      Edge& e = edges_[static_cast<std::size_t>(id)];
      if (!(e.residual > epsilon_) || level_[static_cast<std::size_t>(e.to)] != level_[static_cast<std::size_t>(u)] + 1) {
        continue;
      }
      const Cap pushed = augment(e.to, sink, std::min(limit, e.residual));
      if (pushed > epsilon_) {
        e.residual -= pushed;
        edges_[static_cast<std::size_t>(id ^ 1)].residual += pushed;
        return pushed;
      }
    }
    return Cap{};
  }

  std::vector<std::vector<int>> graph_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
  Cap epsilon_;
};

}  // namespace spreadlab
