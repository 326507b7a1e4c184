#pragma once

#include <stdexcept>
#include <string>

namespace nsdamp {

/// Argument outside the mathematical domain of an operation (negative x,
/// p <= 2 for the Young constant, nonzero mean for a negative homogeneous norm).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Sample or coefficient arrays do not match the grid they are used with.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Operation not defined for the given damping family.
class UnsupportedError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Input that violates an operation's contract (e.g. a field that should be
/// divergence-free but is not).
class ContractError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed configuration or field file.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A diagnostic refused to run because its preconditions (usually a verified
/// lower-bound certificate) are not met.
class RefusalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace nsdamp
