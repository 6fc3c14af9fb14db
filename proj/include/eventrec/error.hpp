#pragma once

#include <stdexcept>
#include <string>

namespace eventrec {

// Exit-code mapping used by the CLI: ConfigError -> 2, DataError -> 3,
// anything else -> 4.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eventrec
