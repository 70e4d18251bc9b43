#pragma once

#include <stdexcept>
#include <string>

namespace rampart {

/// Invalid or inconsistent configuration detected before any work starts.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's documented precondition at run time
/// (e.g. activating a bank whose activate counter sits at its limit).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Memory-controller protocol violation, such as issuing a directed RFM
/// to a bank with no captured target row.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An internal row has no controller address (unused spare or retired row).
class RemapError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// The requested computation exceeds what the implementation will materialize.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rampart
