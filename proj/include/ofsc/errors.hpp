#pragma once

#include <stdexcept>
#include <string>
#include <vector>
#include <cstdint>

namespace ofsc {

using StateId = int32_t;
using InputId = int32_t;
using OutputId = int32_t;

// Bad ids, malformed relations, violated operation preconditions.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Rejected configuration: bad files, misaligned grids, unsupported combinations.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Synthesis found an empty winning region. Carries the (empty) domain.
struct NoControllerError : std::runtime_error {
  explicit NoControllerError(const std::string& what, std::vector<StateId> dom = {})
      : std::runtime_error(what), domain(std::move(dom)) {}
  std::vector<StateId> domain;
};

// Closed-loop refusal: out-of-domain observation, inconsistent knowledge, etc.
struct RefusalError : std::runtime_error {
  explicit RefusalError(const std::string& what) : std::runtime_error(what) {}
};

// Resource guard tripped (e.g. knowledge-state cap).
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ofsc
