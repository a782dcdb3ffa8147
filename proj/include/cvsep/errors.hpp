#pragma once

#include <stdexcept>
#include <string>

namespace cvsep {

// Precondition violations: bad shapes, out-of-range modes, negative times.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure (series, solver) did not reach its accuracy target.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Amplification exactly balances damping, so no steady state exists.
class ResonanceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// B - iJ is too ill-conditioned to form the Schur complement.
class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

// The predicate does not change value across the requested bracket.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adjacent pieces of a piecewise boundary disagree on their common seam.
class InconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cvsep
