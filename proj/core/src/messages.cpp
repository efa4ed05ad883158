#include "manetcert/messages.hpp"

namespace manetcert {

std::vector<uint8_t> reply_content_bytes(const CertReply& reply) {
  std::vector<uint8_t> out;
  append_u32_be(out, reply.request_id.origin.value());
  append_u32_be(out, reply.request_id.seq);
  append_u32_be(out, reply.responder.value());
  append_u32_be(out, static_cast<uint32_t>(reply.certificates.size()));
  for (const Certificate& cert : reply.certificates) {
    auto bytes = certificate_wire_bytes(cert);
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  out.push_back(reply.multipath ? 1 : 0);
  return out;
}

std::vector<uint8_t> target_notice_signed_bytes(const TargetNotice& n) {
  std::vector<uint8_t> out;
  append_u32_be(out, n.informer.value());
  append_u32_be(out, n.target.value());
  append_u32_be(out, n.requester.value());
  out.insert(out.end(), n.requester_key.bytes.begin(),
             n.requester_key.bytes.end());
  return out;
}

std::vector<uint8_t> rekey_signed_bytes(NodeId node, const PublicKey& new_key) {
  std::vector<uint8_t> out;
  append_u32_be(out, node.value());
  out.insert(out.end(), new_key.bytes.begin(), new_key.bytes.end());
  return out;
}

}  // namespace manetcert
