#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "manetcert/identity.hpp"
#include "manetcert/ids.hpp"

namespace manetcert {

/// Trust in [0, 1]. The checked constructor rejects out-of-range input;
/// arithmetic updates go through clamped().
class TrustLevel {
 public:
  constexpr TrustLevel() = default;
  explicit TrustLevel(double value);

  static TrustLevel clamped(double value);

  constexpr double value() const { return value_; }
  constexpr auto operator<=>(const TrustLevel&) const = default;

 private:
  double value_ = 0.0;
};

struct TrustParams {
  TrustLevel initial_known{0.75};
  TrustLevel initial_unknown{0.5};
  double reward_delta = 0.05;
  double penalty_delta = 0.25;
  TrustLevel mpktv{0.5};

  void validate() const;  // throws ConfigError
};

/// One node's trust bookkeeping: per-peer trust levels, the mutual
/// certifier set K(owner), and certificates held as evidence per subject.
class TrustStore {
 public:
  TrustStore() = default;
  explicit TrustStore(NodeId owner) : owner_(owner) {}

  NodeId owner() const { return owner_; }

  std::optional<TrustLevel> trust_of(NodeId peer) const;
  TrustLevel trust_or(NodeId peer, TrustLevel fallback) const;
  void set_trust(NodeId peer, TrustLevel level);

  /// Adds peer to K(owner); ensures a trust entry exists (at `level` if new,
  /// raised to `level` if currently lower).
  void add_certifier(NodeId peer, TrustLevel level);
  bool is_certifier(NodeId peer) const { return certifiers_.contains(peer); }
  const std::set<NodeId>& certifiers() const { return certifiers_; }

  void hold_certificate(const Certificate& cert);
  void drop_certificates_for(NodeId subject);
  std::span<const Certificate> certificates_for(NodeId subject) const;

  const std::map<NodeId, TrustLevel>& trust_map() const { return trust_; }

 private:
  NodeId owner_;
  std::map<NodeId, TrustLevel> trust_;
  std::set<NodeId> certifiers_;
  std::map<NodeId, std::vector<Certificate>> certificates_held_;
};

/// Trust granted to a peer on first contact.
TrustLevel initial_trust(bool known, const TrustParams& params);

/// Independent-evidence combination: 1 - prod(1 - t_i). Monotone in every
/// argument and in list extension; never below max(t_i).
/// Throws std::invalid_argument on an empty list (no evidence).
TrustLevel aggregate_key_trust(std::span<const TrustLevel> certifier_trusts);

/// Inclusive threshold test: acceptance at aggregate == mpktv.
bool meets_mpktv(TrustLevel aggregate, TrustLevel mpktv);

struct KeyCandidate {
  PublicKey key;
  std::vector<NodeId> certifiers;
};

struct ConflictResult {
  PublicKey key;
  TrustLevel aggregate;
};

/// Picks the candidate key with maximum aggregated certifier trust;
/// exact ties break toward the smallest canonical key encoding, so the
/// winner is independent of candidate order. Certifiers missing from the
/// store count at params.initial_unknown.
ConflictResult resolve_conflict(std::span<const KeyCandidate> candidates,
                                const TrustStore& store,
                                const TrustParams& params);

/// Applies +reward_delta to each listed certifier, clamped to 1.
void reward_certifiers(TrustStore& store, const std::set<NodeId>& certifiers,
                       const TrustParams& params);

/// Applies -penalty_delta to each listed certifier, clamped to 0.
void penalize_certifiers(TrustStore& store, const std::set<NodeId>& certifiers,
                         const TrustParams& params);

}  // namespace manetcert
