#pragma once

#include <stdexcept>
#include <string>

namespace nls {

// Invalid user-supplied parameter (violated precondition).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input data: shape mismatch, unreadable file, bad header.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mathematical domain violation, e.g. normalizing a field with J <= 0.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-finite values or failed iteration.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nls
