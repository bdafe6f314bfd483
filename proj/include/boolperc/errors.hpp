#pragma once

#include <stdexcept>
#include <string>

namespace boolperc {

/// A moment or series the caller needs is infinite for the given law.
class DivergentMoment : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An exhaustive enumeration would exceed the configured size budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The sampled window does not contain the region an event depends on.
class WindowTooSmall : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Input violates the hypotheses of the check being run.
class HypothesisViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A local kernel tried to read a spin outside its declared range.
class LocalityViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace boolperc
