#pragma once

#include <stdexcept>
#include <string>

namespace tiltbound {

// Errors split in two families so the CLI can map them onto exit codes:
// InputError (bad files, malformed models, API misuse) and HypothesisError
// (a mathematical precondition of the bound does not hold).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class HypothesisError : public Error {
public:
    using Error::Error;
};

#define TILTBOUND_DEFINE_ERROR(Name, Base)          \
    class Name : public Base {                      \
    public:                                         \
        explicit Name(const std::string& what)      \
            : Base(std::string(#Name ": ") + what) {} \
    }

TILTBOUND_DEFINE_ERROR(InvalidModel, InputError);
TILTBOUND_DEFINE_ERROR(ParseError, InputError);
TILTBOUND_DEFINE_ERROR(SupportMismatch, InputError);
TILTBOUND_DEFINE_ERROR(UnsupportedCombination, InputError);

TILTBOUND_DEFINE_ERROR(InvalidValueFunction, HypothesisError);
TILTBOUND_DEFINE_ERROR(EvaluationError, HypothesisError);
TILTBOUND_DEFINE_ERROR(DivergentMGF, HypothesisError);
TILTBOUND_DEFINE_ERROR(BelowMeanError, HypothesisError);
TILTBOUND_DEFINE_ERROR(InfeasibleTarget, HypothesisError);
TILTBOUND_DEFINE_ERROR(DegenerateValueFunction, HypothesisError);
TILTBOUND_DEFINE_ERROR(NotAnAtom, HypothesisError);
TILTBOUND_DEFINE_ERROR(RatioUndefined, HypothesisError);
TILTBOUND_DEFINE_ERROR(ImpossibleSample, HypothesisError);
TILTBOUND_DEFINE_ERROR(MLBoundary, HypothesisError);
TILTBOUND_DEFINE_ERROR(ConvergenceError, HypothesisError);
TILTBOUND_DEFINE_ERROR(InternalInvariantViolation, HypothesisError);

#undef TILTBOUND_DEFINE_ERROR

}  // namespace tiltbound
