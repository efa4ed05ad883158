#include "manetcert/trust.hpp"

#include <algorithm>
#include <stdexcept>

#include "manetcert/errors.hpp"

namespace manetcert {

TrustLevel::TrustLevel(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw std::invalid_argument("trust level outside [0,1]");
}

TrustLevel TrustLevel::clamped(double value) {
  return TrustLevel(std::clamp(value, 0.0, 1.0));
}

void TrustParams::validate() const {
  if (reward_delta < 0.0 || penalty_delta < 0.0)
    throw ConfigError("trust deltas must be nonnegative");
  if (penalty_delta < reward_delta)
    throw ConfigError("penalty_delta must be >= reward_delta");
}

std::optional<TrustLevel> TrustStore::trust_of(NodeId peer) const {
  auto it = trust_.find(peer);
  if (it == trust_.end()) return std::nullopt;
  return it->second;
}

TrustLevel TrustStore::trust_or(NodeId peer, TrustLevel fallback) const {
  return trust_of(peer).value_or(fallback);
}

void TrustStore::set_trust(NodeId peer, TrustLevel level) {
  trust_[peer] = level;
}

void TrustStore::add_certifier(NodeId peer, TrustLevel level) {
  certifiers_.insert(peer);
  auto it = trust_.find(peer);
  if (it == trust_.end() || it->second < level) trust_[peer] = level;
}

void TrustStore::hold_certificate(const Certificate& cert) {
  auto& held = certificates_held_[cert.subject];
  if (std::find(held.begin(), held.end(), cert) == held.end())
    held.push_back(cert);
}

void TrustStore::drop_certificates_for(NodeId subject) {
  certificates_held_.erase(subject);
}

std::span<const Certificate> TrustStore::certificates_for(
    NodeId subject) const {
  auto it = certificates_held_.find(subject);
  if (it == certificates_held_.end()) return {};
  return it->second;
}

TrustLevel initial_trust(bool known, const TrustParams& params) {
  return known ? params.initial_known : params.initial_unknown;
}

TrustLevel aggregate_key_trust(std::span<const TrustLevel> certifier_trusts) {
  if (certifier_trusts.empty())
    throw std::invalid_argument("aggregate_key_trust: no evidence");
  double complement = 1.0;
  for (TrustLevel t : certifier_trusts) complement *= 1.0 - t.value();
  return TrustLevel::clamped(1.0 - complement);
}

bool meets_mpktv(TrustLevel aggregate, TrustLevel mpktv) {
  return aggregate >= mpktv;
}

ConflictResult resolve_conflict(std::span<const KeyCandidate> candidates,
                                const TrustStore& store,
                                const TrustParams& params) {
  if (candidates.empty())
    throw std::invalid_argument("resolve_conflict: no candidates");

  bool have_best = false;
  ConflictResult best{};
  std::vector<TrustLevel> trusts;
  for (const KeyCandidate& cand : candidates) {
    if (cand.certifiers.empty())
      throw std::invalid_argument("resolve_conflict: candidate without certifiers");
    trusts.clear();
    for (NodeId certifier : cand.certifiers)
      trusts.push_back(store.trust_or(certifier, params.initial_unknown));
    TrustLevel agg = aggregate_key_trust(trusts);
    // Strictly-greater aggregate wins; an exact tie goes to the smaller key
    // bytes, which makes the result invariant under candidate permutation.
    if (!have_best || agg > best.aggregate ||
        (agg == best.aggregate && cand.key < best.key)) {
      best = ConflictResult{cand.key, agg};
      have_best = true;
    }
  }
  return best;
}

void reward_certifiers(TrustStore& store, const std::set<NodeId>& certifiers,
                       const TrustParams& params) {
  for (NodeId peer : certifiers) {
    TrustLevel cur = store.trust_or(peer, params.initial_unknown);
    store.set_trust(peer, TrustLevel::clamped(cur.value() + params.reward_delta));
  }
}

void penalize_certifiers(TrustStore& store, const std::set<NodeId>& certifiers,
                         const TrustParams& params) {
  for (NodeId peer : certifiers) {
    TrustLevel cur = store.trust_or(peer, params.initial_unknown);
    store.set_trust(peer,
                    TrustLevel::clamped(cur.value() - params.penalty_delta));
  }
}

}  // namespace manetcert
