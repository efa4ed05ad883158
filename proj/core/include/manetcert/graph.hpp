#pragma once

#include <optional>
#include <span>
#include <vector>

#include "manetcert/ids.hpp"

namespace manetcert {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Vec2& a, const Vec2& b);

/// A full source route: ordered hops from source to destination, loop-free.
struct SourceRoute {
  std::vector<NodeId> hops;

  NodeId source() const { return hops.front(); }
  NodeId destination() const { return hops.back(); }
  size_t hop_count() const { return hops.empty() ? 0 : hops.size() - 1; }

  bool operator==(const SourceRoute&) const = default;
};

/// Undirected graph over dense node ids with sorted adjacency lists, so
/// every traversal below is deterministic.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int node_count) : adj_(node_count) {}

  int node_count() const { return static_cast<int>(adj_.size()); }
  void add_edge(NodeId a, NodeId b);
  bool has_edge(NodeId a, NodeId b) const;
  std::span<const NodeId> neighbors(NodeId n) const;
  size_t edge_count() const;

 private:
  std::vector<std::vector<NodeId>> adj_;
};

/// Radio connectivity: edge iff Euclidean distance <= radio_range.
Graph connectivity_graph(std::span<const Vec2> positions, double radio_range);

/// Shortest route by hop count; among equally short routes returns the
/// lexicographically smallest node sequence. nullopt when unreachable.
std::optional<SourceRoute> shortest_route(const Graph& g, NodeId source,
                                          NodeId dest);

/// Up to k pairwise internally-vertex-disjoint routes from source to dest
/// (shared endpoints only). Returns min(k, s-t vertex connectivity) routes,
/// deterministic for a given graph. Computed as unit-capacity max-flow on
/// the node-split transform, then path decomposition.
std::vector<SourceRoute> node_disjoint_paths(const Graph& g, NodeId source,
                                             NodeId dest, int k);

}  // namespace manetcert
