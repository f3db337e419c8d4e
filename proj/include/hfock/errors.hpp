#pragma once

#include <stdexcept>
#include <string>

namespace hfock {

/// Violated mathematical precondition (bad probability, mismatched cutoff, ...).
/// The CLI maps this to exit code 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested herald outcome has (numerically) zero probability.
class UnheraldableError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed or missing input file. The CLI maps this to exit code 3.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hfock
