#pragma once
#include <stdexcept>
#include <string>

namespace frobsig {

// Error taxonomy mirrors the CLI exit codes.
struct ConfigError : std::runtime_error {        // exit 1: bad input / schema
  explicit ConfigError(const std::string& w) : std::runtime_error(w) {}
};
struct NotSmallError : std::runtime_error {      // exit 2: action rejected as not small
  explicit NotSmallError(const std::string& w) : std::runtime_error(w) {}
};
struct ResourceCapError : std::runtime_error {   // exit 3: configured cap exceeded
  explicit ResourceCapError(const std::string& w) : std::runtime_error(w) {}
};
struct InternalCheckError : std::runtime_error { // exit 4: invariant tripped, bug signal
  explicit InternalCheckError(const std::string& w) : std::runtime_error(w) {}
};

}  // namespace frobsig
