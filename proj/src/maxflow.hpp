#pragma once

// Dinic max-flow on real capacities; internal helper for the Prokhorov feasibility test.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace qms::detail {

class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adj_(nodes), level_(nodes), next_(nodes) {}

  void add_edge(std::size_t from, std::size_t to, double cap) {
    adj_[from].push_back(edges_.size());
    edges_.push_back({to, cap});
    adj_[to].push_back(edges_.size());
    edges_.push_back({from, 0.0});
  }

  double run(std::size_t s, std::size_t t, double eps = 1e-15) {
    double flow = 0.0;
    while (bfs(s, t, eps)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (true) {
        const double pushed = dfs(s, t, std::numeric_limits<double>::infinity(), eps);
        if (pushed <= eps) break;
        flow += pushed;
      }
    }
    return flow;
  }

 private:
  struct Edge {
    std::size_t to;
    double cap;
  };

  bool bfs(std::size_t s, std::size_t t, double eps) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t id : adj_[u]) {
        const Edge& e = edges_[id];
        if (e.cap > eps && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(std::size_t u, std::size_t t, double limit, double eps) {
    if (u == t) return limit;
    for (std::size_t& i = next_[u]; i < adj_[u].size(); ++i) {
      const std::size_t id = adj_[u][i];
      Edge& e = edges_[id];
      if (e.cap > eps && level_[e.to] == level_[u] + 1) {
        const double got = dfs(e.to, t, std::min(limit, e.cap), eps);
        if (got > eps) {
          e.cap -= got;
          edges_[id ^ 1U].cap += got;
          return got;
        }
      }
    }
    return 0.0;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

}  // namespace qms::detail
