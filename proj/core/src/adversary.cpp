#include "manetcert/adversary.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "manetcert/errors.hpp"
#include "manetcert/protocol.hpp"
#include "manetcert/rng.hpp"

namespace manetcert {

void AttackerConfig::validate() const {
  if (fraction < 0.0 || fraction > 0.4)
    throw ConfigError("attacker fraction must be in [0, 0.4]");
}

Attacker::Attacker(NodeId id, KeyPair keys, AttackerConfig config,
                   uint64_t run_seed,
                   std::shared_ptr<SharedSpuriousMap> shared_spurious,
                   int reply_paths)
    : id_(id),
      keys_(keys),
      config_(config),
      run_seed_(run_seed),
      shared_spurious_(std::move(shared_spurious)),
      reply_paths_(reply_paths) {}

void Attacker::attach(SimWorld& world) {
  world.set_sink(id_, [this](SimWorld& w, const Delivery& d) {
    return on_message(w, d);
  });
  world.set_relay_hook(
      id_, [this](SimWorld& w, Message& m) { return on_relay(w, m); });
}

PublicKey Attacker::spurious_key_for(NodeId target) {
  if (config_.mode == AttackerMode::Colluding) {
    auto it = shared_spurious_->find(target);
    if (it != shared_spurious_->end()) return it->second;
    // First colluder to answer creates the shared key for this victim; the
    // derivation depends only on (run, target) so every colluder agrees.
    PublicKey key =
        generate_keypair(mix_seed(run_seed_, 0xc0110000ULL | target.value()))
            .public_key;
    (*shared_spurious_)[target] = key;
    return key;
  }
  uint64_t salt =
      (uint64_t(id_.value()) << 32) | uint64_t(target.value());
  return generate_keypair(mix_seed(run_seed_, salt)).public_key;
}

CertReply Attacker::make_spurious_reply(const CertRequest& creq, SimTime now) {
  CertReply reply;
  reply.request_id = creq.id;
  reply.responder = id_;
  // Validly signed by the attacker itself; the binding is the lie.
  reply.certificates.push_back(issue_certificate(
      keys_, id_, creq.target, spurious_key_for(creq.target), now));
  reply.certificates.push_back(
      issue_certificate(keys_, id_, id_, keys_.public_key, now));
  reply.multipath = true;  // requester never knows an attacker
  return reply;
}

bool Attacker::on_message(SimWorld& world, const Delivery& delivery) {
  const auto* creq = std::get_if<CertRequest>(&delivery.msg);
  if (!creq) return false;
  if (creq->origin == id_) return false;
  if (!answered_.insert(creq->id).second) return false;

  CertReply reply = make_spurious_reply(*creq, world.now());
  world.trace().emit(world.now(), "attacker_reply",
                     fmt::format("node={} target={} req={}:{}", id_.value(),
                                 creq->target.value(),
                                 creq->id.origin.value(), creq->id.seq));
  deliver_reply_multipath(world, reply, creq->origin, reply_paths_);
  return false;  // answering consumes the request; no re-broadcast
}

RelayAction Attacker::on_relay(SimWorld&, Message& msg) {
  auto* reply = std::get_if<CertReply>(&msg);
  if (!reply) return RelayAction::PassThrough;
  if (config_.drop_replies) return RelayAction::Drop;
  if (config_.tamper_replies && !reply->certificates.empty()) {
    reply->certificates.front().subject_key.bytes[0] ^= 0xff;
    return RelayAction::Tamper;
  }
  return RelayAction::PassThrough;
}

std::vector<NodeId> select_attackers(uint64_t seed, double fraction,
                                     int node_count,
                                     const std::set<NodeId>& excluded) {
  int count = static_cast<int>(std::llround(fraction * node_count));
  std::vector<NodeId> eligible;
  for (int i = 0; i < node_count; ++i) {
    NodeId id(static_cast<uint32_t>(i));
    if (!excluded.contains(id)) eligible.push_back(id);
  }
  count = std::min<int>(count, static_cast<int>(eligible.size()));
  Rng rng(mix_seed(seed, 0xa77ac4e5ULL));
  rng.shuffle(eligible);
  eligible.resize(count);
  std::sort(eligible.begin(), eligible.end());
  return eligible;
}

}  // namespace manetcert
