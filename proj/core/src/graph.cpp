#include "manetcert/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>

namespace manetcert {

double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void Graph::add_edge(NodeId a, NodeId b) {
  if (a == b) return;
  auto insert_sorted = [](std::vector<NodeId>& v, NodeId x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
  };
  insert_sorted(adj_[a.value()], b);
  insert_sorted(adj_[b.value()], a);
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  const auto& v = adj_[a.value()];
  return std::binary_search(v.begin(), v.end(), b);
}

std::span<const NodeId> Graph::neighbors(NodeId n) const {
  return adj_[n.value()];
}

size_t Graph::edge_count() const {
  size_t total = 0;
  for (const auto& v : adj_) total += v.size();
  return total / 2;
}

Graph connectivity_graph(std::span<const Vec2> positions, double radio_range) {
  Graph g(static_cast<int>(positions.size()));
  for (size_t i = 0; i < positions.size(); ++i)
    for (size_t j = i + 1; j < positions.size(); ++j)
      if (distance(positions[i], positions[j]) <= radio_range)
        g.add_edge(NodeId(static_cast<uint32_t>(i)),
                   NodeId(static_cast<uint32_t>(j)));
  return g;
}

std::optional<SourceRoute> shortest_route(const Graph& g, NodeId source,
                                          NodeId dest) {
  const int n = g.node_count();
  constexpr int kUnreached = -1;
  std::vector<int> dist(n, kUnreached);
  std::deque<NodeId> queue;
  // BFS from the destination, then walk forward greedily picking the
  // smallest-id neighbor one level closer: that yields the lexicographically
  // smallest shortest node sequence from the source.
  dist[dest.value()] = 0;
  queue.push_back(dest);
  while (!queue.empty()) {
    NodeId cur = queue.front();
    queue.pop_front();
    for (NodeId nb : g.neighbors(cur)) {
      if (dist[nb.value()] == kUnreached) {
        dist[nb.value()] = dist[cur.value()] + 1;
        queue.push_back(nb);
      }
    }
  }
  if (dist[source.value()] == kUnreached) return std::nullopt;

  SourceRoute route;
  NodeId cur = source;
  route.hops.push_back(cur);
  while (cur != dest) {
    for (NodeId nb : g.neighbors(cur)) {  // sorted: first hit is smallest id
      if (dist[nb.value()] == dist[cur.value()] - 1) {
        cur = nb;
        route.hops.push_back(cur);
        break;
      }
    }
  }
  return route;
}

namespace {

// Node-split flow network: vertex v becomes v_in = 2v, v_out = 2v + 1 with
// a capacity-1 arc between them (endpoints get infinite self-capacity by
// simply not being split-restricted). Every undirected edge (u, v) becomes
// u_out -> v_in and v_out -> u_in, capacity 1.
struct FlowNet {
  struct Arc {
    int to;
    int cap;
    int rev;  // index of reverse arc in arcs[to]
    bool forward;
  };
  std::vector<std::vector<Arc>> arcs;

  explicit FlowNet(int n) : arcs(n) {}

  void add_arc(int from, int to, int cap) {
    arcs[from].push_back({to, cap, static_cast<int>(arcs[to].size()), true});
    arcs[to].push_back(
        {from, 0, static_cast<int>(arcs[from].size() - 1), false});
  }
};

int node_in(NodeId v) { return 2 * static_cast<int>(v.value()); }
int node_out(NodeId v) { return 2 * static_cast<int>(v.value()) + 1; }

// One BFS augmentation of a unit of flow; returns false when no path. The
// BFS scans arcs in insertion order, which is deterministic because the
// graph's adjacency lists are sorted.
bool augment(FlowNet& net, int s, int t) {
  std::vector<std::pair<int, int>> parent(net.arcs.size(), {-1, -1});
  std::deque<int> queue{s};
  parent[s] = {s, -1};
  while (!queue.empty() && parent[t].first == -1) {
    int cur = queue.front();
    queue.pop_front();
    for (size_t i = 0; i < net.arcs[cur].size(); ++i) {
      const auto& a = net.arcs[cur][i];
      if (a.cap > 0 && parent[a.to].first == -1) {
        parent[a.to] = {cur, static_cast<int>(i)};
        queue.push_back(a.to);
      }
    }
  }
  if (parent[t].first == -1) return false;
  for (int v = t; v != s;) {
    auto [u, idx] = parent[v];
    auto& arc = net.arcs[u][idx];
    arc.cap -= 1;
    net.arcs[arc.to][arc.rev].cap += 1;
    v = u;
  }
  return true;
}

}  // namespace

std::vector<SourceRoute> node_disjoint_paths(const Graph& g, NodeId source,
                                             NodeId dest, int k) {
  if (source == dest)
    throw std::invalid_argument("node_disjoint_paths: source == dest");
  if (k <= 0) return {};

  const int n = g.node_count();
  FlowNet net(2 * n);
  for (int v = 0; v < n; ++v) {
    NodeId id(static_cast<uint32_t>(v));
    int cap = (id == source || id == dest) ? k : 1;
    net.add_arc(node_in(id), node_out(id), cap);
  }
  for (int v = 0; v < n; ++v) {
    NodeId id(static_cast<uint32_t>(v));
    for (NodeId nb : g.neighbors(id)) net.add_arc(node_out(id), node_in(nb), 1);
  }

  const int s = node_out(source);
  const int t = node_in(dest);
  int flow = 0;
  while (flow < k && augment(net, s, t)) ++flow;

  // Decompose: follow saturated forward arcs from the source, consuming
  // them, one path per unit of flow. Unit capacities guarantee loop-free,
  // internally disjoint paths.
  std::vector<SourceRoute> paths;
  for (int p = 0; p < flow; ++p) {
    SourceRoute route;
    route.hops.push_back(source);
    int cur = s;
    while (cur != t) {
      for (auto& arc : net.arcs[cur]) {
        // A saturated forward arc has cap 0 and a positive reverse residual.
        bool forward_unit = arc.forward && arc.cap == 0 &&
                            net.arcs[arc.to][arc.rev].cap > 0;
        if (!forward_unit) continue;
        arc.cap = -1;  // consumed; exclude from later decompositions
        net.arcs[arc.to][arc.rev].cap = 0;
        cur = arc.to;
        break;
      }
      if (cur % 2 == 0 && cur != t)  // entering some v_in: record the node
        route.hops.push_back(NodeId(static_cast<uint32_t>(cur / 2)));
    }
    route.hops.push_back(dest);
    paths.push_back(std::move(route));
  }
  return paths;
}

}  // namespace manetcert
