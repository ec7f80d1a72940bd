#pragma once

#include <stdexcept>
#include <string>

namespace liensync {

// =============================================================================
// Error hierarchy
// =============================================================================
// DomainError and its children map to CLI exit code 1, NumericalError and its
// children to exit code 2. ContractViolation flags a caller bug (malformed
// input that no well-formed call can produce).

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The requested minimisation has no solution (mixed half-planes or |x| < b).
class NoSolutionError : public DomainError {
public:
    using DomainError::DomainError;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EventNotFound : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CycleNotFound : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Driving force diverges (h(x1) = 0 reached with non-zero first integral).
class SingularForceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace liensync
