#pragma once

#include <variant>
#include <vector>

#include "manetcert/identity.hpp"
#include "manetcert/ids.hpp"

namespace manetcert {

/// CREQ: flooded query for the target's certified public key. Carries the
/// requester's certifier list K(origin) and self-claimed key so responders
/// can start the mutual side of the exchange.
struct CertRequest {
  RequestId id;
  NodeId origin;
  NodeId target;
  int ttl = 1;  // hop budget of this attempt
  std::vector<NodeId> origin_certifiers;
  PublicKey origin_key;
};

/// CREP: certificates answering one CREQ. `certificates` holds the
/// responder-issued certificate for the target and, when the responder is
/// unknown to the origin, the responder's self-signed certificate.
/// `path` is filled in at the origin from the hops actually traversed.
struct CertReply {
  RequestId request_id;
  NodeId responder;
  std::vector<Certificate> certificates;
  std::vector<NodeId> path;
  bool multipath = false;  // flagged for node-disjoint delivery
};

/// Unicast from an intermediate holder to the target: "this origin wants
/// your key"; the target may start a reverse exchange toward the origin.
struct TargetNotice {
  NodeId informer;
  NodeId target;
  NodeId requester;
  PublicKey requester_key;
  Signature signature;  // by the informer over the fields above
};

/// First data packet after acceptance: tells the target which certifiers
/// backed its key and offers the origin's own key for mutual certification.
struct MutualInit {
  NodeId from;
  NodeId to;
  PublicKey from_key;
  std::vector<NodeId> certifier_list;
  Certificate cert_for_target;  // issued by `from` for the accepted key
};

/// Target's answer completing mutual certification.
struct MutualAck {
  NodeId from;
  NodeId to;
  Certificate cert_for_origin;  // issued by `from` for the origin's key
};

/// Periodic key update, signed with the old key so current holders of the
/// old binding can authenticate the replacement.
struct RekeyNotice {
  NodeId node;
  PublicKey new_key;
  Certificate new_self_cert;
  Signature old_key_signature;  // over (node, new_key)
};

/// Join-time flooded request for initial certifications.
struct JoinRequest {
  RequestId id;
  NodeId origin;
  Certificate self_cert;
};

struct JoinReply {
  NodeId responder;
  Certificate cert_for_origin;
  Certificate responder_self_cert;
};

using Message = std::variant<CertRequest, CertReply, TargetNotice, MutualInit,
                             MutualAck, RekeyNotice, JoinRequest, JoinReply>;

/// Canonical encoding of a reply's content. The path is excluded: disjoint
/// copies of one reply traverse different paths. Used to cross-check
/// multi-path copies byte-for-byte.
std::vector<uint8_t> reply_content_bytes(const CertReply& reply);

/// Bytes signed by a TargetNotice / RekeyNotice.
std::vector<uint8_t> target_notice_signed_bytes(const TargetNotice& n);
std::vector<uint8_t> rekey_signed_bytes(NodeId node, const PublicKey& new_key);

}  // namespace manetcert
