#pragma once

#include <stdexcept>
#include <string>

namespace manetcert {

/// Invalid scenario / parameter input. Maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure (unreadable config, unwritable output). CLI exit 2.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace manetcert
