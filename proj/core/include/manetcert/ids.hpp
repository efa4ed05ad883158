#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace manetcert {

/// Dense node index, unique within one simulation world. Totally ordered so
/// that ties anywhere in the system break deterministically.
class NodeId {
 public:
  constexpr NodeId() = default;
  constexpr explicit NodeId(uint32_t value) : value_(value) {}

  constexpr uint32_t value() const { return value_; }
  constexpr auto operator<=>(const NodeId&) const = default;

 private:
  uint32_t value_ = 0;
};

/// Identifies one certificate-request attempt: origin plus a per-origin
/// sequence number. Fresh per TTL escalation.
struct RequestId {
  NodeId origin;
  uint32_t seq = 0;

  constexpr auto operator<=>(const RequestId&) const = default;
};

}  // namespace manetcert

template <>
struct std::hash<manetcert::NodeId> {
  size_t operator()(const manetcert::NodeId& id) const noexcept {
    return std::hash<uint32_t>{}(id.value());
  }
};

template <>
struct std::hash<manetcert::RequestId> {
  size_t operator()(const manetcert::RequestId& rid) const noexcept {
    return std::hash<uint64_t>{}(
        (uint64_t(rid.origin.value()) << 32) | rid.seq);
  }
};
