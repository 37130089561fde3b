#pragma once

#include <stdexcept>
#include <string>

namespace aqt {

// Malformed input: bad topology, invalid path, inadmissible script,
// out-of-domain parameters.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameters outside the domain of an analytical formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An engine invariant failed at run time (conservation, unit capacity,
// per-phase n*d bound). Always indicates a bug, never bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace aqt
