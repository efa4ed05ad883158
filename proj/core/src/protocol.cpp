#include "manetcert/protocol.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

#include "manetcert/errors.hpp"

namespace manetcert {

namespace {

std::string req_str(const RequestId& id) {
  return fmt::format("{}:{}", id.origin.value(), id.seq);
}

std::vector<NodeId> reversed_path(const std::vector<NodeId>& path) {
  return {path.rbegin(), path.rend()};
}

}  // namespace

void ProtocolParams::validate() const {
  if (initial_ttl < 1) throw ConfigError("initial_ttl must be >= 1");
  if (ttl_step < 1) throw ConfigError("ttl_step must be >= 1");
  if (ttl_max < initial_ttl)
    throw ConfigError("ttl_max must be >= initial_ttl");
  if (escalation_factor <= 0)
    throw ConfigError("escalation_factor must be positive");
  if (reply_paths < 1) throw ConfigError("reply_paths must be >= 1");
  if (min_known_for_delegation < 0)
    throw ConfigError("min_known_for_delegation must be >= 0");
  if (rekey_period_s < 0) throw ConfigError("rekey_period_s must be >= 0");
}

Node::Node(NodeId id, KeyPair keys, ProtocolParams params,
           TrustParams trust_params)
    : id_(id),
      keys_(keys),
      params_(params),
      trust_params_(trust_params),
      store_(id) {}

void Node::attach(SimWorld& world) {
  world.set_sink(id_, [this](SimWorld& w, const Delivery& d) {
    return on_message(w, d);
  });
  if (params_.rekey_period_s > 0) {
    SimTime period = SimTime::from_seconds(params_.rekey_period_s);
    world.schedule(world.now() + period,
                   [this](SimWorld& w) { periodic_rekey(w); });
  }
}

bool Node::on_message(SimWorld& world, const Delivery& delivery) {
  return std::visit(
      [&](const auto& msg) -> bool {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, CertRequest>) {
          return handle_creq(world, msg, delivery).kind ==
                 CreqDecision::Kind::Forward;
        } else if constexpr (std::is_same_v<T, CertReply>) {
          handle_crep(world, msg, delivery);
          return false;
        } else if constexpr (std::is_same_v<T, TargetNotice>) {
          handle_target_notice(world, msg);
          return false;
        } else if constexpr (std::is_same_v<T, MutualInit>) {
          handle_mutual_init(world, msg, delivery);
          return false;
        } else if constexpr (std::is_same_v<T, MutualAck>) {
          handle_mutual_ack(world, msg);
          return false;
        } else if constexpr (std::is_same_v<T, RekeyNotice>) {
          handle_rekey_notice(world, msg);
          return false;
        } else if constexpr (std::is_same_v<T, JoinRequest>) {
          handle_join_request(world, msg, delivery);
          return true;  // join floods saturate the network
        } else {
          static_assert(std::is_same_v<T, JoinReply>);
          handle_join_reply(world, msg);
          return false;
        }
      },
      delivery.msg);
}

std::optional<PublicKey> Node::known_key(NodeId peer) const {
  if (peer == id_) return keys_.public_key;
  auto it = peer_keys_.find(peer);
  if (it == peer_keys_.end()) return std::nullopt;
  return it->second;
}

void Node::install_peer_key(NodeId peer, const PublicKey& key) {
  peer_keys_[peer] = key;
}

bool Node::key_revoked(const PublicKey& key) const {
  return std::find(revoked_keys_.begin(), revoked_keys_.end(), key) !=
         revoked_keys_.end();
}

const ExchangeState* Node::exchange_for(NodeId target) const {
  auto it = exchanges_.find(target);
  return it == exchanges_.end() ? nullptr : &it->second;
}

CertRequest Node::make_creq(NodeId target, int ttl) {
  CertRequest creq;
  creq.id = RequestId{id_, next_seq_++};
  creq.origin = id_;
  creq.target = target;
  creq.ttl = ttl;
  // The certifier list is refreshed on every attempt.
  creq.origin_certifiers.assign(store_.certifiers().begin(),
                                store_.certifiers().end());
  creq.origin_key = keys_.public_key;
  my_requests_[creq.id] = target;
  return creq;
}

void Node::send_creq(SimWorld& world, NodeId target, int ttl) {
  CertRequest creq = make_creq(target, ttl);
  world.trace().emit(world.now(), "creq_send",
                     fmt::format("node={} target={} req={} ttl={}",
                                 id_.value(), target.value(),
                                 req_str(creq.id), ttl));
  world.flood(id_, creq, ttl);
}

void Node::schedule_escalation(SimWorld& world, NodeId target, int ttl) {
  SimTime wait = world.per_hop_latency() *
                 static_cast<int64_t>(std::llround(params_.escalation_factor *
                                                   static_cast<double>(ttl)));
  world.schedule(world.now() + wait,
                 [this, target](SimWorld& w) { escalate_ttl(w, target); });
}

ExchangeState& Node::start_exchange(SimWorld& world, NodeId target,
                                    TrustLevel mpktv, int initial_ttl) {
  if (target == id_)
    throw std::invalid_argument("start_exchange: target is self");
  if (initial_ttl < 1)
    throw std::invalid_argument("start_exchange: initial_ttl must be >= 1");
  auto existing = exchanges_.find(target);
  if (existing != exchanges_.end() &&
      existing->second.status == ExchangeStatus::Pending)
    throw std::invalid_argument("start_exchange: exchange already pending");

  ExchangeState& exchange = exchanges_[target];
  exchange = ExchangeState{};
  exchange.target = target;
  exchange.mpktv = mpktv;
  exchange.current_ttl = initial_ttl;
  exchange.started_at = world.now();

  world.trace().emit(world.now(), "exchange_start",
                     fmt::format("node={} target={} mpktv={:g} ttl={}",
                                 id_.value(), target.value(), mpktv.value(),
                                 initial_ttl));

  // Local short-circuit: certificates already held for the target may
  // satisfy the threshold with zero network traffic.
  if (auto binding = known_key(target)) {
    std::vector<TrustLevel> trusts;
    std::set<NodeId> certifiers;
    for (const Certificate& cert : store_.certificates_for(target)) {
      if (cert.subject_key != *binding) continue;
      certifiers.insert(cert.issuer);
      trusts.push_back(
          store_.trust_or(cert.issuer, trust_params_.initial_unknown));
    }
    if (!trusts.empty() &&
        meets_mpktv(aggregate_key_trust(trusts), exchange.mpktv)) {
      exchange.status = ExchangeStatus::Accepted;
      exchange.accepted_key = *binding;
      exchange.delay = SimTime::zero();
      exchange.candidate_keys[*binding] = certifiers;
      world.trace().emit(
          world.now(), "exchange_cached",
          fmt::format("node={} target={}", id_.value(), target.value()));
      return exchange;
    }
  }

  send_creq(world, target, initial_ttl);
  schedule_escalation(world, target, initial_ttl);
  return exchange;
}

CreqDecision Node::handle_creq(SimWorld& world, const CertRequest& creq,
                               const Delivery& delivery) {
  CreqDecision decision;
  if (creq.origin == id_) return decision;  // own flood echo
  if (creq.ttl < 1) {
    world.trace().emit(world.now(), "creq_malformed",
                       fmt::format("node={} req={}", id_.value(),
                                   req_str(creq.id)));
    return decision;
  }

  // DSR-style passive learning: the flood path gives a route to the origin.
  if (delivery.path.size() >= 2)
    world.learn_route(id_, SourceRoute{reversed_path(delivery.path)});

  auto [seen_it, first_time] = seen_requests_.try_emplace(creq.id, false);
  if (!first_time) {
    world.trace().emit(world.now(), "creq_recv",
                       fmt::format("node={} from={} req={} decision=dup",
                                   id_.value(), delivery.from.value(),
                                   req_str(creq.id)));
    return decision;  // (1) duplicate: flood suppression
  }

  auto forward_or_drop = [&]() {
    if (delivery.ttl_remaining >= 1) {
      decision.kind = CreqDecision::Kind::Forward;
    } else {
      decision.kind = CreqDecision::Kind::Drop;  // TTL exhausted
    }
  };

  if (creq.target == id_) {
    // (2) The target answers itself only while it knows too few certifiers
    // to delegate; otherwise the flood continues toward them.
    if (static_cast<int>(store_.certifiers().size()) <
        params_.min_known_for_delegation) {
      Certificate self_cert = issue_certificate(keys_, id_, id_,
                                                keys_.public_key, world.now());
      CertReply reply;
      reply.request_id = creq.id;
      reply.responder = id_;
      reply.certificates.push_back(self_cert);
      reply.multipath = !store_.is_certifier(creq.origin);
      decision.kind = CreqDecision::Kind::Reply;
      decision.multipath = reply.multipath;
      seen_it->second = true;
      world.trace().emit(
          world.now(), "creq_recv",
          fmt::format("node={} from={} req={} decision=reply_self",
                      id_.value(), delivery.from.value(), req_str(creq.id)));
      send_reply(world, std::move(reply), creq.origin, delivery);
      return decision;
    }
    forward_or_drop();
    world.trace().emit(
        world.now(), "creq_recv",
        fmt::format("node={} from={} req={} decision={}", id_.value(),
                    delivery.from.value(), req_str(creq.id),
                    decision.kind == CreqDecision::Kind::Forward ? "forward"
                                                                 : "drop"));
    return decision;
  }

  auto binding = known_key(creq.target);
  if (binding && !store_.certificates_for(creq.target).empty()) {
    // (3) Holder replies with a certificate of its own issuance for the
    // key it has established for the target.
    Certificate cert =
        issue_certificate(keys_, id_, creq.target, *binding, world.now());
    CertReply reply;
    reply.request_id = creq.id;
    reply.responder = id_;
    reply.certificates.push_back(cert);
    if (!store_.is_certifier(creq.origin)) {
      // Unknown requester: prove own key with a self-signed certificate and
      // send over node-disjoint paths.
      reply.certificates.push_back(issue_certificate(
          keys_, id_, id_, keys_.public_key, world.now()));
      reply.multipath = true;
    }
    decision.kind = CreqDecision::Kind::Reply;
    decision.multipath = reply.multipath;
    seen_it->second = true;

    // Cached route to the target: tell it someone wants its key.
    if (auto route = world.cached_route(id_, creq.target)) {
      TargetNotice notice;
      notice.informer = id_;
      notice.target = creq.target;
      notice.requester = creq.origin;
      notice.requester_key = creq.origin_key;
      notice.signature = default_scheme().sign(
          keys_.secret_key, target_notice_signed_bytes(notice));
      world.unicast(*route, notice);
      decision.notified_target = true;
    }

    world.trace().emit(
        world.now(), "creq_recv",
        fmt::format("node={} from={} req={} decision=reply multipath={} "
                    "notify={}",
                    id_.value(), delivery.from.value(), req_str(creq.id),
                    decision.multipath ? 1 : 0,
                    decision.notified_target ? 1 : 0));
    send_reply(world, std::move(reply), creq.origin, delivery);
    return decision;
  }

  // (4) Plain relay.
  forward_or_drop();
  world.trace().emit(
      world.now(), "creq_recv",
      fmt::format("node={} from={} req={} decision={}", id_.value(),
                  delivery.from.value(), req_str(creq.id),
                  decision.kind == CreqDecision::Kind::Forward ? "forward"
                                                               : "drop"));
  return decision;
}

void Node::send_reply(SimWorld& world, CertReply reply, NodeId origin,
                      const Delivery& creq_delivery) {
  world.trace().emit(world.now(), "crep_send",
                     fmt::format("node={} req={} multipath={}", id_.value(),
                                 req_str(reply.request_id),
                                 reply.multipath ? 1 : 0));
  if (reply.multipath) {
    deliver_reply_multipath(world, reply, origin, params_.reply_paths);
    return;
  }
  // Known requester: single copy back along the reverse of the flood path.
  world.unicast(SourceRoute{reversed_path(creq_delivery.path)},
                std::move(reply));
}

int deliver_reply_multipath(SimWorld& world, const CertReply& reply,
                            NodeId origin, int path_count) {
  auto paths = world.disjoint_paths(reply.responder, origin, path_count);
  if (paths.empty()) {
    world.trace().emit(world.now(), "reply_nopath",
                       fmt::format("node={} origin={}",
                                   reply.responder.value(), origin.value()));
    return 0;
  }
  for (const SourceRoute& path : paths) world.unicast(path, reply);
  return static_cast<int>(paths.size());
}

void Node::handle_crep(SimWorld& world, const CertReply& reply,
                       const Delivery& delivery) {
  auto req_it = my_requests_.find(reply.request_id);
  if (req_it == my_requests_.end()) {
    world.trace().emit(world.now(), "crep_ignored",
                       fmt::format("node={} reason=unknown_request req={}",
                                   id_.value(), req_str(reply.request_id)));
    return;
  }
  NodeId target = req_it->second;
  auto ex_it = exchanges_.find(target);
  if (ex_it == exchanges_.end()) return;
  ExchangeState& exchange = ex_it->second;

  world.trace().emit(world.now(), "crep_recv",
                     fmt::format("node={} responder={} req={}", id_.value(),
                                 reply.responder.value(),
                                 req_str(reply.request_id)));

  // Cross-check copies of the same reply arriving over disjoint paths; any
  // mismatch means an on-path adversary rewrote one, so the whole reply is
  // distrusted and dropped.
  auto copy_key = std::make_pair(reply.request_id, reply.responder);
  auto content = reply_content_bytes(reply);
  auto copy_it = reply_copies_.find(copy_key);
  if (copy_it != reply_copies_.end()) {
    ReplyCopy& copy = copy_it->second;
    if (copy.tampered) return;
    if (copy.content != content) {
      copy.tampered = true;
      world.trace().emit(world.now(), "tamper_detected",
                         fmt::format("node={} responder={} req={}",
                                     id_.value(), reply.responder.value(),
                                     req_str(reply.request_id)));
      if (exchange.status == ExchangeStatus::Pending)
        discard_responder_evidence(exchange, reply.responder);
    }
    return;  // identical duplicate ignored
  }
  reply_copies_[copy_key] = ReplyCopy{std::move(content), false};

  if (exchange.status != ExchangeStatus::Pending) return;

  CertReply recorded = reply;
  recorded.path = delivery.path;
  exchange.replies.push_back(std::move(recorded));

  intake_reply(world, exchange, reply);
  evaluate_exchange(world, exchange);
}

void Node::intake_reply(SimWorld& world, ExchangeState& exchange,
                        const CertReply& reply) {
  // A self-signed companion certificate proves possession of the claimed
  // responder key; authenticity is exactly what trust weighting covers.
  std::optional<PublicKey> responder_claimed;
  for (const Certificate& cert : reply.certificates) {
    if (cert.self_signed && cert.subject == reply.responder &&
        verify_certificate(cert, cert.subject_key)) {
      responder_claimed = cert.subject_key;
    }
  }

  for (const Certificate& cert : reply.certificates) {
    if (cert.subject != exchange.target) continue;
    if (cert.issuer != reply.responder) {
      world.trace().emit(world.now(), "crep_ignored",
                         fmt::format("node={} reason=foreign_issuer req={}",
                                     id_.value(), req_str(reply.request_id)));
      continue;
    }
    std::optional<PublicKey> issuer_key = known_key(cert.issuer);
    if (!issuer_key && cert.self_signed) issuer_key = cert.subject_key;
    if (!issuer_key) issuer_key = responder_claimed;
    if (!issuer_key) {
      world.trace().emit(world.now(), "crep_ignored",
                         fmt::format("node={} reason=unverifiable req={}",
                                     id_.value(), req_str(reply.request_id)));
      continue;
    }
    if (!verify_certificate(cert, *issuer_key)) {
      world.trace().emit(world.now(), "crep_ignored",
                         fmt::format("node={} reason=bad_signature req={}",
                                     id_.value(), req_str(reply.request_id)));
      continue;
    }
    exchange.candidate_keys[cert.subject_key].insert(cert.issuer);
    if (!store_.trust_of(cert.issuer))
      store_.set_trust(cert.issuer, initial_trust(false, trust_params_));
  }
}

void Node::discard_responder_evidence(ExchangeState& exchange,
                                      NodeId responder) {
  for (auto it = exchange.candidate_keys.begin();
       it != exchange.candidate_keys.end();) {
    it->second.erase(responder);
    it = it->second.empty() ? exchange.candidate_keys.erase(it)
                            : std::next(it);
  }
}

void Node::evaluate_exchange(SimWorld& world, ExchangeState& exchange) {
  if (exchange.status != ExchangeStatus::Pending ||
      exchange.candidate_keys.empty())
    return;

  std::vector<KeyCandidate> candidates;
  candidates.reserve(exchange.candidate_keys.size());
  for (const auto& [key, certifiers] : exchange.candidate_keys)
    candidates.push_back(
        KeyCandidate{key, {certifiers.begin(), certifiers.end()}});

  ConflictResult best = resolve_conflict(candidates, store_, trust_params_);
  if (!meets_mpktv(best.aggregate, exchange.mpktv)) return;

  exchange.status = ExchangeStatus::Accepted;
  exchange.accepted_key = best.key;
  exchange.delay = world.now() - exchange.started_at;

  const std::set<NodeId>& winners = exchange.candidate_keys[best.key];
  std::set<NodeId> losers;
  for (const auto& [key, certifiers] : exchange.candidate_keys) {
    if (key == best.key) continue;
    for (NodeId certifier : certifiers)
      if (!winners.contains(certifier)) losers.insert(certifier);
  }
  reward_certifiers(store_, winners, trust_params_);
  penalize_certifiers(store_, losers, trust_params_);

  install_peer_key(exchange.target, best.key);
  for (const CertReply& reply : exchange.replies)
    for (const Certificate& cert : reply.certificates)
      if (cert.subject == exchange.target && cert.subject_key == best.key &&
          winners.contains(cert.issuer))
        store_.hold_certificate(cert);

  world.trace().emit(
      world.now(), "exchange_accept",
      fmt::format("node={} target={} delay={:.6f} certifiers={}", id_.value(),
                  exchange.target.value(), exchange.delay.seconds(),
                  winners.size()));

  finalize_mutual(world, exchange.target);
}

void Node::escalate_ttl(SimWorld& world, NodeId target) {
  auto it = exchanges_.find(target);
  if (it == exchanges_.end()) return;
  ExchangeState& exchange = it->second;
  if (exchange.status != ExchangeStatus::Pending) return;  // no-op guard

  if (exchange.current_ttl + params_.ttl_step > params_.ttl_max) {
    exchange.status = ExchangeStatus::Failed;
    world.trace().emit(
        world.now(), "exchange_fail",
        fmt::format("node={} target={}", id_.value(), target.value()));
    return;
  }
  exchange.current_ttl += params_.ttl_step;
  world.trace().emit(world.now(), "escalate",
                     fmt::format("node={} target={} ttl={}", id_.value(),
                                 target.value(), exchange.current_ttl));
  send_creq(world, target, exchange.current_ttl);
  schedule_escalation(world, target, exchange.current_ttl);
}

void Node::finalize_mutual(SimWorld& world, NodeId target) {
  auto it = exchanges_.find(target);
  if (it == exchanges_.end() ||
      it->second.status != ExchangeStatus::Accepted)
    return;
  const ExchangeState& exchange = it->second;

  auto route = world.discover_route(id_, target);
  if (!route) {
    world.trace().emit(
        world.now(), "mutual_noroute",
        fmt::format("node={} target={}", id_.value(), target.value()));
    return;
  }

  MutualInit init;
  init.from = id_;
  init.to = target;
  init.from_key = keys_.public_key;
  const auto& winners = exchange.candidate_keys.at(exchange.accepted_key);
  init.certifier_list.assign(winners.begin(), winners.end());
  init.cert_for_target = issue_certificate(keys_, id_, target,
                                           exchange.accepted_key, world.now());
  world.trace().emit(
      world.now(), "mutual_init",
      fmt::format("node={} target={}", id_.value(), target.value()));
  world.unicast(*route, init);
}

void Node::handle_mutual_init(SimWorld& world, const MutualInit& init,
                              const Delivery& delivery) {
  if (init.to != id_) return;
  // Refuse when the origin accepted a binding that is not our key: issuing
  // a mutual certificate would endorse a corrupted exchange.
  if (init.cert_for_target.subject_key != keys_.public_key) {
    world.trace().emit(world.now(), "mutual_reject_badkey",
                       fmt::format("node={} origin={}", id_.value(),
                                   init.from.value()));
    return;
  }
  std::vector<TrustLevel> trusts;
  for (NodeId certifier : init.certifier_list)
    trusts.push_back(
        store_.trust_or(certifier, trust_params_.initial_unknown));
  if (trusts.empty() ||
      !meets_mpktv(aggregate_key_trust(trusts), trust_params_.mpktv)) {
    world.trace().emit(world.now(), "mutual_reject_trust",
                       fmt::format("node={} origin={}", id_.value(),
                                   init.from.value()));
    return;
  }

  install_peer_key(init.from, init.from_key);
  Certificate cert =
      issue_certificate(keys_, id_, init.from, init.from_key, world.now());
  store_.hold_certificate(cert);
  store_.hold_certificate(init.cert_for_target);
  TrustLevel floor = initial_trust(true, trust_params_);
  store_.add_certifier(init.from, floor);
  world.trace().emit(world.now(), "mutual_accept",
                     fmt::format("node={} origin={}", id_.value(),
                                 init.from.value()));

  MutualAck ack{id_, init.from, cert};
  SourceRoute back{reversed_path(delivery.path)};
  if (back.hops.size() >= 2) {
    world.unicast(back, ack);
  } else if (auto route = world.discover_route(id_, init.from)) {
    world.unicast(*route, ack);
  }
}

void Node::handle_mutual_ack(SimWorld& world, const MutualAck& ack) {
  if (ack.to != id_) return;
  auto peer_key = known_key(ack.from);
  if (!peer_key) return;
  const Certificate& cert = ack.cert_for_origin;
  if (cert.subject != id_ || cert.subject_key != keys_.public_key) return;
  if (!verify_certificate(cert, *peer_key)) return;

  store_.hold_certificate(cert);
  store_.add_certifier(ack.from, initial_trust(true, trust_params_));
  world.trace().emit(
      world.now(), "mutual_complete",
      fmt::format("node={} peer={}", id_.value(), ack.from.value()));
}

void Node::handle_target_notice(SimWorld& world, const TargetNotice& notice) {
  if (notice.target != id_ || notice.requester == id_) return;
  auto informer_key = known_key(notice.informer);
  if (!informer_key ||
      !default_scheme().verify(*informer_key,
                               target_notice_signed_bytes(notice),
                               notice.signature)) {
    world.trace().emit(world.now(), "notice_ignored",
                       fmt::format("node={} informer={}", id_.value(),
                                   notice.informer.value()));
    return;
  }
  if (exchanges_.contains(notice.requester)) return;
  world.trace().emit(world.now(), "notice_accept",
                     fmt::format("node={} requester={}", id_.value(),
                                 notice.requester.value()));
  start_exchange(world, notice.requester, trust_params_.mpktv,
                 params_.initial_ttl);
}

void Node::periodic_rekey(SimWorld& world) {
  KeyPair old_keys = keys_;
  keys_ = generate_keypair(world.rng().next_u64());
  revoked_keys_.push_back(old_keys.public_key);
  store_.drop_certificates_for(id_);  // certificates for the old key

  RekeyNotice notice;
  notice.node = id_;
  notice.new_key = keys_.public_key;
  notice.new_self_cert =
      issue_certificate(keys_, id_, id_, keys_.public_key, world.now());
  notice.old_key_signature = default_scheme().sign(
      old_keys.secret_key, rekey_signed_bytes(id_, keys_.public_key));

  world.trace().emit(world.now(), "rekey",
                     fmt::format("node={} peers={}", id_.value(),
                                 store_.certifiers().size()));
  for (NodeId peer : store_.certifiers()) {
    auto route = world.discover_route(id_, peer);
    if (!route) {
      world.trace().emit(
          world.now(), "rekey_unreachable",
          fmt::format("node={} peer={}", id_.value(), peer.value()));
      continue;
    }
    world.unicast(*route, notice);
  }

  if (params_.rekey_period_s > 0) {
    SimTime period = SimTime::from_seconds(params_.rekey_period_s);
    if (world.now() + period <= world.duration())
      world.schedule(world.now() + period,
                     [this](SimWorld& w) { periodic_rekey(w); });
  }
}

void Node::handle_rekey_notice(SimWorld& world, const RekeyNotice& notice) {
  if (notice.node == id_) return;
  auto old_key = known_key(notice.node);
  if (!old_key) {
    world.trace().emit(
        world.now(), "rekey_unknown",
        fmt::format("node={} peer={}", id_.value(), notice.node.value()));
    return;
  }
  if (!default_scheme().verify(*old_key,
                               rekey_signed_bytes(notice.node, notice.new_key),
                               notice.old_key_signature)) {
    world.trace().emit(
        world.now(), "rekey_badsig",
        fmt::format("node={} peer={}", id_.value(), notice.node.value()));
    return;
  }
  install_peer_key(notice.node, notice.new_key);
  store_.drop_certificates_for(notice.node);
  store_.hold_certificate(
      issue_certificate(keys_, id_, notice.node, notice.new_key, world.now()));
  world.trace().emit(
      world.now(), "rekey_applied",
      fmt::format("node={} peer={}", id_.value(), notice.node.value()));
}

void Node::bootstrap(SimWorld& world) {
  JoinRequest join;
  join.id = RequestId{id_, next_seq_++};
  join.origin = id_;
  join.self_cert =
      issue_certificate(keys_, id_, id_, keys_.public_key, world.now());
  world.trace().emit(world.now(), "join_send",
                     fmt::format("node={}", id_.value()));
  world.flood(id_, join, world.node_count());
}

void Node::handle_join_request(SimWorld& world, const JoinRequest& join,
                               const Delivery& delivery) {
  if (join.origin == id_) return;
  auto [it, first_time] = seen_requests_.try_emplace(join.id, false);
  if (!first_time) return;
  const Certificate& cert = join.self_cert;
  if (!cert.self_signed || cert.subject != join.origin ||
      !verify_certificate(cert, cert.subject_key))
    return;
  it->second = true;

  install_peer_key(join.origin, cert.subject_key);
  Certificate issued = issue_certificate(keys_, id_, join.origin,
                                         cert.subject_key, world.now());
  store_.hold_certificate(issued);
  store_.add_certifier(join.origin, initial_trust(true, trust_params_));

  JoinReply reply{
      id_, issued,
      issue_certificate(keys_, id_, id_, keys_.public_key, world.now())};
  world.trace().emit(world.now(), "join_recv",
                     fmt::format("node={} origin={}", id_.value(),
                                 join.origin.value()));
  world.unicast(SourceRoute{reversed_path(delivery.path)}, reply);
}

void Node::handle_join_reply(SimWorld& world, const JoinReply& reply) {
  const Certificate& self_cert = reply.responder_self_cert;
  if (!self_cert.self_signed || self_cert.subject != reply.responder ||
      !verify_certificate(self_cert, self_cert.subject_key))
    return;
  const Certificate& cert = reply.cert_for_origin;
  if (cert.subject != id_ || cert.subject_key != keys_.public_key) return;
  if (!verify_certificate(cert, self_cert.subject_key)) return;

  install_peer_key(reply.responder, self_cert.subject_key);
  store_.hold_certificate(cert);
  store_.add_certifier(reply.responder, initial_trust(true, trust_params_));
  world.trace().emit(world.now(), "join_complete",
                     fmt::format("node={} peer={}", id_.value(),
                                 reply.responder.value()));
}

void install_mutual_certification(Node& a, Node& b, SimTime now,
                                  const TrustParams& params) {
  TrustLevel known = initial_trust(true, params);
  a.install_peer_key(b.id(), b.public_key());
  b.install_peer_key(a.id(), a.public_key());
  Certificate cert_for_b =
      issue_certificate(a.keys(), a.id(), b.id(), b.public_key(), now);
  Certificate cert_for_a =
      issue_certificate(b.keys(), b.id(), a.id(), a.public_key(), now);
  // Each side holds the certificate it issued (to answer future CREQs) and
  // the one naming it (its own certifier evidence).
  a.store().hold_certificate(cert_for_b);
  a.store().hold_certificate(cert_for_a);
  b.store().hold_certificate(cert_for_a);
  b.store().hold_certificate(cert_for_b);
  a.store().add_certifier(b.id(), known);
  b.store().add_certifier(a.id(), known);
}

}  // namespace manetcert
