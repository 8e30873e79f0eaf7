#pragma once

#include <stdexcept>
#include <string>

namespace classteach {

/// Caller passed arguments that break a documented precondition
/// (dimension mismatch, out-of-range index, invalid probability, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unknown scenario/strategy name or malformed command-line request.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A parameter lies outside the domain where a formula is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input file could not be parsed; the message names the offending field.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input parsed but violates a model invariant (e.g. a non-stochastic row).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A demonstration whose constraint system has no feasible value vector.
class InfeasibleDemonstration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown inside a solver.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A metric is undefined on this input (e.g. relative loss with zero optimal value).
class DegenerateScenario : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace classteach
