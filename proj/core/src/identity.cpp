#include "manetcert/identity.hpp"

#include "manetcert/rng.hpp"

namespace manetcert {

namespace {

uint64_t rotl(uint64_t x, int b) { return (x << b) | (x >> (64 - b)); }

uint64_t load_u64_le(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void sipround(uint64_t& v0, uint64_t& v1, uint64_t& v2, uint64_t& v3) {
  v0 += v1;
  v1 = rotl(v1, 13);
  v1 ^= v0;
  v0 = rotl(v0, 32);
  v2 += v3;
  v3 = rotl(v3, 16);
  v3 ^= v2;
  v0 += v3;
  v3 = rotl(v3, 21);
  v3 ^= v0;
  v2 += v1;
  v1 = rotl(v1, 17);
  v1 ^= v2;
  v2 = rotl(v2, 32);
}

std::array<uint8_t, 16> u64_pair_to_bytes(uint64_t a, uint64_t b) {
  std::array<uint8_t, 16> out{};
  for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(a >> (8 * i));
  for (int i = 0; i < 8; ++i) out[8 + i] = static_cast<uint8_t>(b >> (8 * i));
  return out;
}

PublicKey derive_public(const SecretKey& secret) {
  const uint8_t label0[1] = {0x00};
  const uint8_t label1[1] = {0x01};
  uint64_t a = siphash24(secret.bytes, label0);
  uint64_t b = siphash24(secret.bytes, label1);
  return PublicKey{u64_pair_to_bytes(a, b)};
}

}  // namespace

uint64_t siphash24(std::span<const uint8_t, 16> key,
                   std::span<const uint8_t> message) {
  uint64_t k0 = load_u64_le(key.data());
  uint64_t k1 = load_u64_le(key.data() + 8);
  uint64_t v0 = k0 ^ 0x736f6d6570736575ULL;
  uint64_t v1 = k1 ^ 0x646f72616e646f6dULL;
  uint64_t v2 = k0 ^ 0x6c7967656e657261ULL;
  uint64_t v3 = k1 ^ 0x7465646279746573ULL;

  size_t n = message.size();
  const uint8_t* p = message.data();
  const uint8_t* end = p + (n - n % 8);
  for (; p != end; p += 8) {
    uint64_t m = load_u64_le(p);
    v3 ^= m;
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    v0 ^= m;
  }
  uint64_t last = uint64_t(n & 0xff) << 56;
  for (size_t i = 0; i < n % 8; ++i) last |= uint64_t(p[i]) << (8 * i);
  v3 ^= last;
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  v0 ^= last;
  v2 ^= 0xff;
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  return v0 ^ v1 ^ v2 ^ v3;
}

KeyPair KeyedDigestScheme::generate(uint64_t seed) const {
  // splitmix64's first output is a bijection of the seed, so distinct seeds
  // can never collide on the secret.
  uint64_t state = seed;
  uint64_t a = splitmix64(state);
  uint64_t b = splitmix64(state);
  SecretKey secret{u64_pair_to_bytes(a, b)};
  return KeyPair{derive_public(secret), secret};
}

Signature KeyedDigestScheme::sign(const SecretKey& secret,
                                  std::span<const uint8_t> message) const {
  PublicKey pub = derive_public(secret);
  uint64_t d = siphash24(pub.bytes, message);
  Signature sig;
  for (int i = 0; i < 8; ++i) sig.bytes[i] = static_cast<uint8_t>(d >> (8 * i));
  return sig;
}

bool KeyedDigestScheme::verify(const PublicKey& signer,
                               std::span<const uint8_t> message,
                               const Signature& sig) const {
  uint64_t d = siphash24(signer.bytes, message);
  Signature expect;
  for (int i = 0; i < 8; ++i)
    expect.bytes[i] = static_cast<uint8_t>(d >> (8 * i));
  return expect == sig;
}

const SignatureScheme& default_scheme() {
  static const KeyedDigestScheme scheme;
  return scheme;
}

KeyPair generate_keypair(uint64_t seed, const SignatureScheme& scheme) {
  return scheme.generate(seed);
}

void append_u32_be(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void append_i64_be(std::vector<uint8_t>& out, int64_t v) {
  auto u = static_cast<uint64_t>(v);
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<uint8_t>(u >> shift));
}

std::vector<uint8_t> certificate_signed_bytes(const Certificate& cert) {
  std::vector<uint8_t> out;
  out.reserve(4 + 4 + 16 + 8);
  append_u32_be(out, cert.issuer.value());
  append_u32_be(out, cert.subject.value());
  out.insert(out.end(), cert.subject_key.bytes.begin(),
             cert.subject_key.bytes.end());
  append_i64_be(out, cert.issued_at.micros());
  return out;
}

std::vector<uint8_t> certificate_wire_bytes(const Certificate& cert) {
  std::vector<uint8_t> out = certificate_signed_bytes(cert);
  out.insert(out.end(), cert.signature.bytes.begin(),
             cert.signature.bytes.end());
  out.push_back(cert.self_signed ? 1 : 0);
  return out;
}

Certificate issue_certificate(const KeyPair& issuer_keys, NodeId issuer,
                              NodeId subject, const PublicKey& subject_key,
                              SimTime now, const SignatureScheme& scheme) {
  Certificate cert;
  cert.issuer = issuer;
  cert.subject = subject;
  cert.subject_key = subject_key;
  cert.issued_at = now;
  cert.self_signed = (issuer == subject);
  cert.signature =
      scheme.sign(issuer_keys.secret_key, certificate_signed_bytes(cert));
  return cert;
}

bool verify_certificate(const Certificate& cert, const PublicKey& issuer_key,
                        const SignatureScheme& scheme) {
  return scheme.verify(issuer_key, certificate_signed_bytes(cert),
                       cert.signature);
}

}  // namespace manetcert
