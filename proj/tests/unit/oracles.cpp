#include "oracles.hpp"

#include <algorithm>
#include <deque>

namespace oracles {

MatrixGraph to_matrix(const Graph& g) {
  MatrixGraph m(g.node_count());
  for (int v = 0; v < g.node_count(); ++v)
    for (NodeId nb : g.neighbors(NodeId(static_cast<uint32_t>(v))))
      m.adj[v][nb.value()] = true;
  return m;
}

std::set<NodeId> bfs_ball(const MatrixGraph& g, int origin, int radius) {
  std::vector<int> dist(g.n, -1);
  dist[origin] = 0;
  std::deque<int> queue{origin};
  std::set<NodeId> ball;
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    if (dist[cur] >= radius) continue;
    for (int nb = 0; nb < g.n; ++nb) {
      if (g.adj[cur][nb] && dist[nb] == -1) {
        dist[nb] = dist[cur] + 1;
        ball.insert(NodeId(static_cast<uint32_t>(nb)));
        queue.push_back(nb);
      }
    }
  }
  return ball;
}

int bfs_distance(const MatrixGraph& g, int source, int dest) {
  std::vector<int> dist(g.n, -1);
  dist[source] = 0;
  std::deque<int> queue{source};
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    if (cur == dest) return dist[cur];
    for (int nb = 0; nb < g.n; ++nb)
      if (g.adj[cur][nb] && dist[nb] == -1) {
        dist[nb] = dist[cur] + 1;
        queue.push_back(nb);
      }
  }
  return -1;
}

namespace {

bool ff_dfs(std::vector<std::vector<int>>& cap, int cur, int t,
            std::vector<bool>& visited) {
  if (cur == t) return true;
  visited[cur] = true;
  for (int nxt = 0; nxt < static_cast<int>(cap.size()); ++nxt) {
    if (cap[cur][nxt] > 0 && !visited[nxt] && ff_dfs(cap, nxt, t, visited)) {
      cap[cur][nxt] -= 1;
      cap[nxt][cur] += 1;
      return true;
    }
  }
  return false;
}

}  // namespace

int vertex_connectivity(const MatrixGraph& g, int s, int t) {
  // Split each vertex v into in=v, out=n+v; s/t get a huge self capacity.
  int big = 2 * g.n + 1;
  std::vector<std::vector<int>> cap(2 * g.n, std::vector<int>(2 * g.n, 0));
  for (int v = 0; v < g.n; ++v)
    cap[v][g.n + v] = (v == s || v == t) ? big : 1;
  for (int u = 0; u < g.n; ++u)
    for (int v = 0; v < g.n; ++v)
      if (g.adj[u][v]) cap[g.n + u][v] = 1;

  int flow = 0;
  while (true) {
    std::vector<bool> visited(2 * g.n, false);
    if (!ff_dfs(cap, g.n + s, t, visited)) break;
    ++flow;
    if (flow > big) break;  // safety; cannot happen
  }
  return flow;
}

Graph random_graph(int nodes, double edge_prob, manetcert::Rng& rng) {
  Graph g(nodes);
  for (int i = 0; i < nodes; ++i)
    for (int j = i + 1; j < nodes; ++j)
      if (rng.next_unit() < edge_prob)
        g.add_edge(NodeId(static_cast<uint32_t>(i)),
                   NodeId(static_cast<uint32_t>(j)));
  return g;
}

bool paths_internally_disjoint(
    const Graph& g, const std::vector<manetcert::SourceRoute>& paths,
    NodeId source, NodeId dest) {
  std::set<NodeId> internals_seen;
  for (const auto& route : paths) {
    if (route.hops.size() < 2) return false;
    if (route.hops.front() != source || route.hops.back() != dest)
      return false;
    std::set<NodeId> in_route;
    for (size_t i = 0; i + 1 < route.hops.size(); ++i)
      if (!g.has_edge(route.hops[i], route.hops[i + 1])) return false;
    for (NodeId hop : route.hops)
      if (!in_route.insert(hop).second) return false;  // loop
    for (size_t i = 1; i + 1 < route.hops.size(); ++i)
      if (!internals_seen.insert(route.hops[i]).second)
        return false;  // shared internal node
  }
  return true;
}

double combine_evidence(const std::vector<double>& trusts) {
  double complement = 1.0;
  for (double t : trusts) complement *= 1.0 - t;
  return 1.0 - complement;
}

double chi_squared_uniform(const std::vector<int>& counts, double expected) {
  double stat = 0.0;
  for (int c : counts) {
    double d = c - expected;
    stat += d * d / expected;
  }
  return stat;
}

}  // namespace oracles
