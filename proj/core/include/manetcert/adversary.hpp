#pragma once

#include <map>
#include <memory>
#include <set>
#include <vector>

#include "manetcert/identity.hpp"
#include "manetcert/ids.hpp"
#include "manetcert/netsim.hpp"

namespace manetcert {

enum class AttackerMode { Isolated, Colluding };

struct AttackerConfig {
  AttackerMode mode = AttackerMode::Isolated;
  double fraction = 0.0;  // of all nodes, in [0, 0.4]
  bool drop_replies = false;
  bool tamper_replies = false;

  void validate() const;  // throws ConfigError
};

/// Spurious keys shared across colluders within one run, one per victim.
using SharedSpuriousMap = std::map<NodeId, PublicKey>;

/// A malicious participant: answers every CREQ it sees with a validly
/// signed certificate binding the target to a spurious key, and optionally
/// drops or rewrites replies it relays. It never forges: everything it
/// emits verifies only under its own key.
class Attacker {
 public:
  Attacker(NodeId id, KeyPair keys, AttackerConfig config, uint64_t run_seed,
           std::shared_ptr<SharedSpuriousMap> shared_spurious,
           int reply_paths = 2);

  NodeId id() const { return id_; }
  const PublicKey& public_key() const { return keys_.public_key; }

  /// Registers the message sink and relay hook.
  void attach(SimWorld& world);

  CertReply make_spurious_reply(const CertRequest& creq, SimTime now);

  /// Isolated: a key derived from (attacker, target); Colluding: the shared
  /// per-target entry, created on first use.
  PublicKey spurious_key_for(NodeId target);

  RelayAction on_relay(SimWorld& world, Message& msg);

 private:
  bool on_message(SimWorld& world, const Delivery& delivery);

  NodeId id_;
  KeyPair keys_;
  AttackerConfig config_;
  uint64_t run_seed_;
  std::shared_ptr<SharedSpuriousMap> shared_spurious_;
  int reply_paths_;
  std::set<RequestId> answered_;
};

/// Deterministic uniform draw of attacker ids from nodes outside `excluded`
/// (the communication endpoints). Count = round(fraction * node_count).
std::vector<NodeId> select_attackers(uint64_t seed, double fraction,
                                     int node_count,
                                     const std::set<NodeId>& excluded);

}  // namespace manetcert
