#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>
#include <vector>

#include "manetcert/graph.hpp"
#include "manetcert/ids.hpp"
#include "manetcert/messages.hpp"
#include "manetcert/rng.hpp"
#include "manetcert/sim_time.hpp"
#include "manetcert/trace.hpp"

namespace manetcert {

struct SimConfig {
  int node_count = 100;
  double area_width = 1500.0;   // meters
  double area_height = 1500.0;  // meters
  double duration_s = 120.0;
  double max_speed = 10.0;  // m/s; 0 freezes all nodes in place
  double pause_time_s = 30.0;
  double radio_range = 250.0;  // meters
  double per_hop_latency_s = 0.01;
  uint64_t rng_seed = 1;
  double mobility_tick_s = 1.0;

  void validate() const;  // throws ConfigError
};

/// Random-waypoint state of one node: travel toward the waypoint at a drawn
/// speed, pause on arrival, then draw a fresh uniform waypoint.
struct WaypointState {
  Vec2 position;
  Vec2 waypoint;
  double speed = 0.0;
  SimTime pause_until = SimTime::zero();
  bool at_waypoint = true;
};

void waypoint_step(WaypointState& state, SimTime now, double dt_seconds,
                   Rng& rng, const SimConfig& config);

class SimWorld;

/// One message arriving at a node. References are only valid during the
/// sink call.
struct Delivery {
  const Message& msg;
  NodeId from;
  NodeId to;
  const std::vector<NodeId>& path;  // hops traversed, origin first, `to` last
  int ttl_remaining = 0;            // flood deliveries only
  uint64_t flood_id = 0;
  bool via_flood = false;
};

/// Per-node receive handler. For flood deliveries the return value decides
/// whether this node re-broadcasts; it is ignored for unicasts.
using MessageSink = std::function<bool(SimWorld&, const Delivery&)>;

enum class RelayAction { PassThrough, Drop, Tamper };

/// Consulted at every intermediate hop of a unicast; may mutate the
/// in-flight message (Tamper) or swallow it (Drop).
using RelayHook = std::function<RelayAction(SimWorld&, Message&)>;

/// Deterministic discrete-event world: clock, event queue ordered by
/// (time, insertion sequence), random-waypoint mobility, radio connectivity
/// recomputed per tick, TTL-scoped flooding, source-routed unicast with
/// per-node route caches, and an append-only trace.
class SimWorld {
 public:
  explicit SimWorld(const SimConfig& config);
  /// Fixed initial placement; mobility still applies unless max_speed == 0.
  SimWorld(const SimConfig& config, std::vector<Vec2> positions);

  SimWorld(const SimWorld&) = delete;
  SimWorld& operator=(const SimWorld&) = delete;

  const SimConfig& config() const { return config_; }
  int node_count() const { return config_.node_count; }
  SimTime now() const { return now_; }
  SimTime duration() const { return duration_; }
  SimTime per_hop_latency() const { return per_hop_latency_; }

  void schedule(SimTime at, std::function<void(SimWorld&)> fn);
  /// Processes every event with time <= until, in order; clock ends at
  /// `until`. Throws std::invalid_argument if until < now().
  void run_until(SimTime until);
  void run_all() { run_until(duration_); }

  const Graph& graph() const { return graph_; }
  const Vec2& position(NodeId n) const;

  void set_sink(NodeId n, MessageSink sink);
  void set_relay_hook(NodeId n, RelayHook hook);

  /// TTL-scoped flood from origin. Every node within `ttl` hops receives the
  /// message exactly once (if every sink keeps forwarding); duplicates are
  /// suppressed. Returns the flood id for reached-set queries.
  uint64_t flood(NodeId origin, Message msg, int ttl);
  std::set<NodeId> flood_reached(uint64_t flood_id) const;

  /// Source-routed send along an explicit route. Hops cost per_hop_latency
  /// each; a vanished link or a dropping relay ends the transit (traced).
  void unicast(const SourceRoute& route, Message msg);

  std::vector<SourceRoute> disjoint_paths(NodeId source, NodeId dest,
                                          int k) const;

  /// Cached-route lookup, falling back to shortest-path discovery on the
  /// current graph. Cached routes are invalidated when a link on them
  /// disappears at a mobility tick.
  std::optional<SourceRoute> discover_route(NodeId source, NodeId dest);
  std::optional<SourceRoute> cached_route(NodeId owner, NodeId dest) const;
  void learn_route(NodeId owner, SourceRoute route);

  Rng& rng() { return rng_; }
  Trace& trace() { return trace_; }

  /// Link transmissions so far (flood and unicast hops); used by the
  /// flood-suppression bound tests.
  uint64_t transmission_count() const { return transmissions_; }

 private:
  struct Event {
    SimTime at;
    uint64_t seq;
    mutable std::function<void(SimWorld&)> fn;
    bool operator>(const Event& other) const {
      return std::tie(at, seq) > std::tie(other.at, other.seq);
    }
  };

  struct FloodState {
    std::vector<char> seen;
    std::set<NodeId> delivered;
  };

  struct Transit {
    Message msg;
    SourceRoute route;
    std::vector<NodeId> traversed;
  };

  void init_mobility();
  void mobility_tick();
  void recompute_graph();
  void invalidate_broken_routes();
  void forward_flood(NodeId sender, const std::shared_ptr<const Message>& msg,
                     int budget, uint64_t flood_id,
                     const std::vector<NodeId>& path);
  void unicast_hop(const std::shared_ptr<Transit>& transit, size_t hop_index);

  SimConfig config_;
  SimTime duration_;
  SimTime per_hop_latency_;
  SimTime mobility_tick_interval_;
  SimTime now_ = SimTime::zero();
  uint64_t next_event_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;

  std::vector<WaypointState> mobility_;
  std::vector<Vec2> positions_;
  Graph graph_;

  std::vector<MessageSink> sinks_;
  std::vector<RelayHook> relay_hooks_;
  std::vector<std::map<NodeId, SourceRoute>> route_caches_;

  uint64_t next_flood_id_ = 1;
  std::unordered_map<uint64_t, FloodState> floods_;
  uint64_t transmissions_ = 0;

  Rng rng_;
  Rng mobility_rng_;
  Trace trace_;
};

}  // namespace manetcert
