#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "manetcert/sim_time.hpp"

namespace manetcert {

/// Append-only event log. One line per record:
///   <seconds, 6 decimals> <kind> <key=value ...>
/// Field order is fixed by the emitting call site, so identical runs yield
/// byte-identical logs.
class Trace {
 public:
  explicit Trace(bool enabled = false) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  void set_enabled(bool on) { enabled_ = on; }

  void emit(SimTime at, std::string_view kind, std::string_view detail);

  const std::vector<std::string>& lines() const { return lines_; }
  size_t count_kind(std::string_view kind) const;
  void write(std::ostream& out) const;
  void clear() { lines_.clear(); }

 private:
  bool enabled_;
  std::vector<std::string> lines_;
};

}  // namespace manetcert
