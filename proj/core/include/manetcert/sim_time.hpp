#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>

namespace manetcert {

/// Simulation time as integer microseconds. Integer arithmetic keeps the
/// event queue ordering and every trace timestamp bit-reproducible.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_micros(int64_t us) { return SimTime(us); }
  static SimTime from_seconds(double s) {
    return SimTime(static_cast<int64_t>(std::llround(s * 1e6)));
  }
  static constexpr SimTime zero() { return SimTime(0); }
  static constexpr SimTime max() {
    return SimTime(std::numeric_limits<int64_t>::max());
  }

  constexpr int64_t micros() const { return us_; }
  constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const { return SimTime(us_ + o.us_); }
  constexpr SimTime operator-(SimTime o) const { return SimTime(us_ - o.us_); }
  constexpr SimTime& operator+=(SimTime o) {
    us_ += o.us_;
    return *this;
  }
  constexpr SimTime operator*(int64_t k) const { return SimTime(us_ * k); }

 private:
  constexpr explicit SimTime(int64_t us) : us_(us) {}
  int64_t us_ = 0;
};

}  // namespace manetcert
