#pragma once

#include <stdexcept>
#include <string>

namespace dcqo {

// Bad user-supplied configuration (invalid parameters, sizes over cap).
// The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Operands that do not fit together (qubit counts, vector lengths).
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what)
      : std::invalid_argument(what) {}
};

inline constexpr int kDefaultQubitCap = 20;

}  // namespace dcqo
