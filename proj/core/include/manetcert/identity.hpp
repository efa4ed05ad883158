#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "manetcert/ids.hpp"
#include "manetcert/sim_time.hpp"

namespace manetcert {

struct PublicKey {
  std::array<uint8_t, 16> bytes{};

  constexpr auto operator<=>(const PublicKey&) const = default;
};

struct SecretKey {
  std::array<uint8_t, 16> bytes{};

  constexpr auto operator<=>(const SecretKey&) const = default;
};

struct KeyPair {
  PublicKey public_key;
  SecretKey secret_key;
};

struct Signature {
  std::array<uint8_t, 8> bytes{};

  constexpr auto operator<=>(const Signature&) const = default;
};

/// A signed binding (issuer, subject, subject public key). Self-signed iff
/// issuer == subject. The protocol's unit of evidence; whether the binding
/// is *true* is exactly what the trust layer decides.
struct Certificate {
  NodeId issuer;
  NodeId subject;
  PublicKey subject_key;
  SimTime issued_at;
  Signature signature;
  bool self_signed = false;

  auto operator<=>(const Certificate&) const = default;
};

/// Pluggable signing backend. The default is simulation-grade: a keyed
/// digest, not real asymmetric cryptography. Unforgeability is structural:
/// sign() is the only way to produce a Signature and it requires the
/// SecretKey, which the simulator never hands to another node.
class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;

  virtual KeyPair generate(uint64_t seed) const = 0;
  virtual Signature sign(const SecretKey& secret,
                         std::span<const uint8_t> message) const = 0;
  virtual bool verify(const PublicKey& signer, std::span<const uint8_t> message,
                      const Signature& sig) const = 0;
};

/// Default scheme: SipHash-2-4 digests. The public key is derived from the
/// secret; the signature is the digest of the message keyed by the signer's
/// derived public key, so holders of the public key can check it.
class KeyedDigestScheme final : public SignatureScheme {
 public:
  KeyPair generate(uint64_t seed) const override;
  Signature sign(const SecretKey& secret,
                 std::span<const uint8_t> message) const override;
  bool verify(const PublicKey& signer, std::span<const uint8_t> message,
              const Signature& sig) const override;
};

const SignatureScheme& default_scheme();

/// SipHash-2-4 with a 128-bit key. Exposed for tests.
uint64_t siphash24(std::span<const uint8_t, 16> key,
                   std::span<const uint8_t> message);

/// Deterministic: identical seeds yield identical pairs, distinct seeds
/// yield distinct public keys.
KeyPair generate_keypair(uint64_t seed,
                         const SignatureScheme& scheme = default_scheme());

Certificate issue_certificate(const KeyPair& issuer_keys, NodeId issuer,
                              NodeId subject, const PublicKey& subject_key,
                              SimTime now,
                              const SignatureScheme& scheme = default_scheme());

bool verify_certificate(const Certificate& cert, const PublicKey& issuer_key,
                        const SignatureScheme& scheme = default_scheme());

/// Canonical serialization of the signed fields (issuer, subject,
/// subject_key, issued_at): fixed order, big-endian integers.
std::vector<uint8_t> certificate_signed_bytes(const Certificate& cert);

/// Full canonical encoding (signed fields plus signature); used for the
/// byte-identical cross-check of multi-path reply copies.
std::vector<uint8_t> certificate_wire_bytes(const Certificate& cert);

void append_u32_be(std::vector<uint8_t>& out, uint32_t v);
void append_i64_be(std::vector<uint8_t>& out, int64_t v);

}  // namespace manetcert

template <>
struct std::hash<manetcert::PublicKey> {
  size_t operator()(const manetcert::PublicKey& k) const noexcept {
    uint64_t h = 1469598103934665603ULL;
    for (uint8_t b : k.bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
    return static_cast<size_t>(h);
  }
};
