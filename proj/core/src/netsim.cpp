#include "manetcert/netsim.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

#include "manetcert/errors.hpp"

namespace manetcert {

void SimConfig::validate() const {
  if (node_count <= 0) throw ConfigError("node_count must be positive");
  if (area_width <= 0 || area_height <= 0)
    throw ConfigError("area dimensions must be positive");
  if (duration_s <= 0) throw ConfigError("duration_s must be positive");
  if (max_speed < 0) throw ConfigError("max_speed must be nonnegative");
  if (pause_time_s < 0) throw ConfigError("pause_time_s must be nonnegative");
  if (radio_range <= 0) throw ConfigError("radio_range must be positive");
  if (per_hop_latency_s <= 0)
    throw ConfigError("per_hop_latency_s must be positive");
  if (mobility_tick_s <= 0)
    throw ConfigError("mobility_tick_s must be positive");
}

void waypoint_step(WaypointState& state, SimTime now, double dt_seconds,
                   Rng& rng, const SimConfig& config) {
  if (config.max_speed <= 0.0) return;  // frozen topology
  if (state.at_waypoint) {
    if (now < state.pause_until) return;
    state.waypoint = Vec2{rng.uniform(0.0, config.area_width),
                          rng.uniform(0.0, config.area_height)};
    // Speed uniform in (0, max]: 1 - u maps [0,1) onto (0,1].
    state.speed = config.max_speed * (1.0 - rng.next_unit());
    state.at_waypoint = false;
    return;
  }
  double remaining = distance(state.position, state.waypoint);
  double step = state.speed * dt_seconds;
  if (step >= remaining) {
    state.position = state.waypoint;
    state.at_waypoint = true;
    state.pause_until = now + SimTime::from_seconds(config.pause_time_s);
    return;
  }
  double scale = step / remaining;
  state.position.x += (state.waypoint.x - state.position.x) * scale;
  state.position.y += (state.waypoint.y - state.position.y) * scale;
}

SimWorld::SimWorld(const SimConfig& config) : SimWorld(config, {}) {}

SimWorld::SimWorld(const SimConfig& config, std::vector<Vec2> positions)
    : config_(config),
      duration_(SimTime::from_seconds(config.duration_s)),
      per_hop_latency_(SimTime::from_seconds(config.per_hop_latency_s)),
      mobility_tick_interval_(SimTime::from_seconds(config.mobility_tick_s)),
      sinks_(config.node_count),
      relay_hooks_(config.node_count),
      route_caches_(config.node_count),
      rng_(mix_seed(config.rng_seed, 0x6e657473696d5f31ULL)),
      mobility_rng_(mix_seed(config.rng_seed, 0x6d6f62696c697479ULL)) {
  config_.validate();
  if (!positions.empty() &&
      positions.size() != static_cast<size_t>(config_.node_count))
    throw ConfigError("explicit positions must cover every node");
  positions_ = std::move(positions);
  if (positions_.empty()) {
    positions_.reserve(config_.node_count);
    for (int i = 0; i < config_.node_count; ++i)
      positions_.push_back(Vec2{mobility_rng_.uniform(0.0, config_.area_width),
                                mobility_rng_.uniform(0.0, config_.area_height)});
  }
  init_mobility();
  recompute_graph();
  if (config_.max_speed > 0.0) {
    schedule(mobility_tick_interval_, [](SimWorld& w) { w.mobility_tick(); });
  }
}

void SimWorld::init_mobility() {
  mobility_.resize(config_.node_count);
  for (int i = 0; i < config_.node_count; ++i) {
    mobility_[i].position = positions_[i];
    mobility_[i].at_waypoint = true;
    mobility_[i].pause_until = SimTime::zero();
  }
}

const Vec2& SimWorld::position(NodeId n) const {
  return positions_.at(n.value());
}

void SimWorld::schedule(SimTime at, std::function<void(SimWorld&)> fn) {
  if (at < now_) throw std::invalid_argument("schedule in the past");
  events_.push(Event{at, next_event_seq_++, std::move(fn)});
}

void SimWorld::run_until(SimTime until) {
  if (until < now_) throw std::invalid_argument("run_until before now");
  while (!events_.empty() && events_.top().at <= until) {
    auto fn = std::move(events_.top().fn);
    now_ = events_.top().at;
    events_.pop();
    fn(*this);
  }
  now_ = until;
}

void SimWorld::mobility_tick() {
  for (auto& state : mobility_)
    waypoint_step(state, now_, config_.mobility_tick_s, mobility_rng_,
                  config_);
  for (int i = 0; i < config_.node_count; ++i)
    positions_[i] = mobility_[i].position;
  recompute_graph();
  invalidate_broken_routes();
  SimTime next = now_ + mobility_tick_interval_;
  if (next <= duration_)
    schedule(next, [](SimWorld& w) { w.mobility_tick(); });
}

void SimWorld::recompute_graph() {
  graph_ = connectivity_graph(positions_, config_.radio_range);
}

void SimWorld::invalidate_broken_routes() {
  for (auto& cache : route_caches_) {
    for (auto it = cache.begin(); it != cache.end();) {
      const auto& hops = it->second.hops;
      bool broken = false;
      for (size_t i = 0; i + 1 < hops.size(); ++i) {
        if (!graph_.has_edge(hops[i], hops[i + 1])) {
          broken = true;
          break;
        }
      }
      it = broken ? cache.erase(it) : std::next(it);
    }
  }
}

void SimWorld::set_sink(NodeId n, MessageSink sink) {
  sinks_.at(n.value()) = std::move(sink);
}

void SimWorld::set_relay_hook(NodeId n, RelayHook hook) {
  relay_hooks_.at(n.value()) = std::move(hook);
}

uint64_t SimWorld::flood(NodeId origin, Message msg, int ttl) {
  if (ttl < 1) throw std::invalid_argument("flood ttl must be >= 1");
  uint64_t id = next_flood_id_++;
  auto& state = floods_[id];
  state.seen.assign(config_.node_count, 0);
  state.seen[origin.value()] = 1;
  forward_flood(origin, std::make_shared<const Message>(std::move(msg)), ttl,
                id, {origin});
  return id;
}

void SimWorld::forward_flood(NodeId sender,
                             const std::shared_ptr<const Message>& msg,
                             int budget, uint64_t flood_id,
                             const std::vector<NodeId>& path) {
  if (budget < 1) return;
  // One radio transmission reaches the sender's neighbors as of now.
  auto neighbors = graph_.neighbors(sender);
  if (neighbors.empty()) return;
  ++transmissions_;
  std::vector<NodeId> targets(neighbors.begin(), neighbors.end());
  SimTime arrive = now_ + per_hop_latency_;
  for (NodeId nb : targets) {
    schedule(arrive, [this, sender, nb, msg, budget, flood_id,
                      path](SimWorld& w) {
      auto it = floods_.find(flood_id);
      if (it == floods_.end()) return;
      auto& state = it->second;
      if (state.seen[nb.value()]) return;  // duplicate suppressed
      state.seen[nb.value()] = 1;
      state.delivered.insert(nb);
      std::vector<NodeId> hop_path = path;
      hop_path.push_back(nb);
      Delivery delivery{*msg,     sender, nb,  hop_path,
                        budget - 1, flood_id, true};
      bool forward = true;
      if (sinks_[nb.value()]) forward = sinks_[nb.value()](w, delivery);
      if (forward && budget - 1 >= 1)
        forward_flood(nb, msg, budget - 1, flood_id, hop_path);
    });
  }
}

std::set<NodeId> SimWorld::flood_reached(uint64_t flood_id) const {
  auto it = floods_.find(flood_id);
  if (it == floods_.end()) return {};
  return it->second.delivered;
}

void SimWorld::unicast(const SourceRoute& route, Message msg) {
  if (route.hops.size() < 2)
    throw std::invalid_argument("unicast route needs at least two hops");
  auto transit = std::make_shared<Transit>();
  transit->msg = std::move(msg);
  transit->route = route;
  transit->traversed.push_back(route.hops.front());
  unicast_hop(transit, 0);
}

void SimWorld::unicast_hop(const std::shared_ptr<Transit>& transit,
                           size_t hop_index) {
  NodeId from = transit->route.hops[hop_index];
  NodeId to = transit->route.hops[hop_index + 1];
  if (!graph_.has_edge(from, to)) {
    trace_.emit(now_, "link_drop",
                fmt::format("node={} next={}", from.value(), to.value()));
    return;
  }
  ++transmissions_;
  schedule(now_ + per_hop_latency_, [this, transit, hop_index,
                                     to](SimWorld& w) {
    transit->traversed.push_back(to);
    bool is_dest = hop_index + 2 == transit->route.hops.size();
    if (!is_dest) {
      if (relay_hooks_[to.value()]) {
        RelayAction action = relay_hooks_[to.value()](w, transit->msg);
        if (action == RelayAction::Drop) {
          trace_.emit(now_, "relay_drop", fmt::format("node={}", to.value()));
          return;
        }
        if (action == RelayAction::Tamper)
          trace_.emit(now_, "relay_tamper",
                      fmt::format("node={}", to.value()));
      }
      unicast_hop(transit, hop_index + 1);
      return;
    }
    Delivery delivery{transit->msg,
                      transit->route.hops[hop_index],
                      to,
                      transit->traversed,
                      0,
                      0,
                      false};
    if (sinks_[to.value()]) sinks_[to.value()](w, delivery);
  });
}

std::vector<SourceRoute> SimWorld::disjoint_paths(NodeId source, NodeId dest,
                                                  int k) const {
  return node_disjoint_paths(graph_, source, dest, k);
}

std::optional<SourceRoute> SimWorld::discover_route(NodeId source,
                                                    NodeId dest) {
  if (auto cached = cached_route(source, dest)) return cached;
  auto route = shortest_route(graph_, source, dest);
  if (!route) {
    trace_.emit(now_, "route_fail",
                fmt::format("node={} dest={}", source.value(), dest.value()));
    return std::nullopt;
  }
  route_caches_[source.value()][dest] = *route;
  return route;
}

std::optional<SourceRoute> SimWorld::cached_route(NodeId owner,
                                                  NodeId dest) const {
  const auto& cache = route_caches_.at(owner.value());
  auto it = cache.find(dest);
  if (it == cache.end()) return std::nullopt;
  return it->second;
}

void SimWorld::learn_route(NodeId owner, SourceRoute route) {
  if (route.hops.size() < 2 || route.hops.front() != owner) return;
  route_caches_[owner.value()][route.destination()] = std::move(route);
}

}  // namespace manetcert
