#pragma once

#include <stdexcept>
#include <string>

namespace advlb {

// Contract violations by the caller: bad shapes, out-of-range parameters,
// malformed input files.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// The scoring backend could not answer (model load failure, network
// timeout, 5xx). Never swallowed by the search.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace advlb
