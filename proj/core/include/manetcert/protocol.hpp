#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "manetcert/identity.hpp"
#include "manetcert/ids.hpp"
#include "manetcert/messages.hpp"
#include "manetcert/netsim.hpp"
#include "manetcert/trust.hpp"

namespace manetcert {

struct ProtocolParams {
  int initial_ttl = 2;
  int ttl_step = 2;
  int ttl_max = 16;
  /// Escalation timer = factor * ttl * per-hop latency.
  double escalation_factor = 2.0;
  /// Node-disjoint copies for replies to unknown requesters.
  int reply_paths = 2;
  /// The target answers its own CREQ only while |K(target)| is below this.
  int min_known_for_delegation = 1;
  /// Period of implicit-revocation key updates; 0 disables them.
  double rekey_period_s = 0.0;

  void validate() const;  // throws ConfigError
};

enum class ExchangeStatus { Pending, Accepted, Failed };

/// Progress of one key request toward one target.
struct ExchangeState {
  NodeId target;
  TrustLevel mpktv;
  int current_ttl = 0;
  SimTime started_at;
  ExchangeStatus status = ExchangeStatus::Pending;
  PublicKey accepted_key;  // meaningful when Accepted
  SimTime delay;           // acceptance time - started_at
  std::vector<CertReply> replies;
  std::map<PublicKey, std::set<NodeId>> candidate_keys;
};

struct CreqDecision {
  enum class Kind { Drop, Reply, Forward };
  Kind kind = Kind::Drop;
  bool multipath = false;
  bool notified_target = false;
};

/// Per-node certification state machine. One Node per simulated honest
/// participant, owned and driven by the world's event loop.
class Node {
 public:
  Node(NodeId id, KeyPair keys, ProtocolParams params,
       TrustParams trust_params);

  NodeId id() const { return id_; }
  const PublicKey& public_key() const { return keys_.public_key; }
  const KeyPair& keys() const { return keys_; }
  TrustStore& store() { return store_; }
  const TrustStore& store() const { return store_; }
  const TrustParams& trust_params() const { return trust_params_; }

  /// Registers this node's message sink (and rekey timer when configured).
  void attach(SimWorld& world);

  /// Join-time flood asking current members for initial certifications.
  void bootstrap(SimWorld& world);

  /// Begins a certificate exchange toward `target`. Throws on a duplicate
  /// pending exchange or target == self. Accepts immediately (zero traffic)
  /// when locally held certificates already satisfy mpktv.
  ExchangeState& start_exchange(SimWorld& world, NodeId target,
                                TrustLevel mpktv, int initial_ttl);

  CreqDecision handle_creq(SimWorld& world, const CertRequest& creq,
                           const Delivery& delivery);
  void handle_crep(SimWorld& world, const CertReply& reply,
                   const Delivery& delivery);

  /// Expanding-ring retry; Fails the exchange once the TTL cap is reached.
  void escalate_ttl(SimWorld& world, NodeId target);

  /// Sends the first data packet (certifier list + own key) to an accepted
  /// target, inviting mutual certification.
  void finalize_mutual(SimWorld& world, NodeId target);

  /// Implicit revocation: fresh key pair, announced to K(self) under the
  /// old key's signature.
  void periodic_rekey(SimWorld& world);

  const std::map<NodeId, ExchangeState>& exchanges() const {
    return exchanges_;
  }
  const ExchangeState* exchange_for(NodeId target) const;

  std::optional<PublicKey> known_key(NodeId peer) const;
  void install_peer_key(NodeId peer, const PublicKey& key);
  bool key_revoked(const PublicKey& key) const;

 private:
  friend void install_mutual_certification(Node&, Node&, SimTime,
                                           const TrustParams&);

  bool on_message(SimWorld& world, const Delivery& delivery);
  void handle_target_notice(SimWorld& world, const TargetNotice& notice);
  void handle_mutual_init(SimWorld& world, const MutualInit& init,
                          const Delivery& delivery);
  void handle_mutual_ack(SimWorld& world, const MutualAck& ack);
  void handle_rekey_notice(SimWorld& world, const RekeyNotice& notice);
  void handle_join_request(SimWorld& world, const JoinRequest& join,
                           const Delivery& delivery);
  void handle_join_reply(SimWorld& world, const JoinReply& reply);

  CertRequest make_creq(NodeId target, int ttl);
  void send_creq(SimWorld& world, NodeId target, int ttl);
  void schedule_escalation(SimWorld& world, NodeId target, int ttl);
  void send_reply(SimWorld& world, CertReply reply, NodeId origin,
                  const Delivery& creq_delivery);
  void intake_reply(SimWorld& world, ExchangeState& exchange,
                    const CertReply& reply);
  void evaluate_exchange(SimWorld& world, ExchangeState& exchange);
  void discard_responder_evidence(ExchangeState& exchange, NodeId responder);

  NodeId id_;
  KeyPair keys_;
  ProtocolParams params_;
  TrustParams trust_params_;
  TrustStore store_;

  std::map<RequestId, bool> seen_requests_;  // value: replied
  std::map<NodeId, ExchangeState> exchanges_;
  std::map<RequestId, NodeId> my_requests_;

  struct ReplyCopy {
    std::vector<uint8_t> content;
    bool tampered = false;
  };
  std::map<std::pair<RequestId, NodeId>, ReplyCopy> reply_copies_;

  std::map<NodeId, PublicKey> peer_keys_;
  std::vector<PublicKey> revoked_keys_;
  uint32_t next_seq_ = 0;
};

/// Sends a reply to `origin` over up to `path_count` node-disjoint routes
/// (all existing ones when fewer). Returns the number of copies sent;
/// zero is traced as a delivery failure.
int deliver_reply_multipath(SimWorld& world, const CertReply& reply,
                            NodeId origin, int path_count);

/// Installs mutual certification between two nodes without network traffic:
/// each issues a certificate for the other's key, adds the other to its
/// certifier set, and grants at least initial_known trust. Used by the
/// experiment pre-seeding and by tests.
void install_mutual_certification(Node& a, Node& b, SimTime now,
                                  const TrustParams& params);

}  // namespace manetcert
