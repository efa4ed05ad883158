#include "manetcert/trace.hpp"

#include <fmt/format.h>

namespace manetcert {

void Trace::emit(SimTime at, std::string_view kind, std::string_view detail) {
  if (!enabled_) return;
  lines_.push_back(detail.empty()
                       ? fmt::format("{:.6f} {}", at.seconds(), kind)
                       : fmt::format("{:.6f} {} {}", at.seconds(), kind, detail));
}

size_t Trace::count_kind(std::string_view kind) const {
  size_t n = 0;
  for (const auto& line : lines_) {
    size_t start = line.find(' ');
    if (start == std::string::npos) continue;
    ++start;
    size_t end = line.find(' ', start);
    std::string_view k(line.data() + start,
                       (end == std::string::npos ? line.size() : end) - start);
    if (k == kind) ++n;
  }
  return n;
}

void Trace::write(std::ostream& out) const {
  for (const auto& line : lines_) out << line << '\n';
}

}  // namespace manetcert
