#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mfspec {

/// Default cap on the number of elementary evaluations an enumeration may
/// perform (words, tails, grid points).
inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 24;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// N^n words exceed the enumeration budget; callers must aggregate by
/// composition class instead.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// N^(k-1) cylinder tails of a depth-k table exceed the budget.
class DepthExceedsBudget : public BudgetExceeded {
public:
    using BudgetExceeded::BudgetExceeded;
};

/// Operation has no exact route for a table of this depth.
class DepthUnsupported : public Error {
public:
    using Error::Error;
};

/// Root bracket could not be established within the configured span.
class BracketFailure : public Error {
public:
    using Error::Error;
};

/// Every tail coefficient of a series is an empty sum (radius +inf).
class AllEmpty : public Error {
public:
    using Error::Error;
};

/// A shrinking-target schedule needs at least three radii.
class ScheduleTooShort : public Error {
public:
    using Error::Error;
};

/// No member of the optimisation family satisfies the target constraint.
class InfeasibleConstraint : public Error {
public:
    using Error::Error;
};

/// Malformed input document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace mfspec
