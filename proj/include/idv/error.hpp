#pragma once

#include <stdexcept>
#include <string>

namespace idv {

// Malformed arguments: arity mismatch, negative signals, bad parameters.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidMask : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// An exact oracle would have to enumerate too many atoms.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The operation is not defined for this kind of instance.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Secretary instance too small for the rule's sampling phase.
class DegenerateInstance : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// A critical-value search found an allocation that is not monotone in the
// winner's own signal.
class MonotonicityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace idv
