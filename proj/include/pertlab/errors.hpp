#pragma once

#include <stdexcept>
#include <string>

namespace pertlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// invalid argument outside the mathematical domain of an operation (e.g. real z)
struct DomainError : Error {
    using Error::Error;
};

// constructor / factory parameter outside its allowed range
struct ParameterError : Error {
    using Error::Error;
};

// malformed model data (e.g. density that does not integrate to one)
struct ModelError : Error {
    using Error::Error;
};

// numerical invariant violated during a computation
struct NumericError : Error {
    using Error::Error;
};

// a requested tolerance could not be met
struct ToleranceError : Error {
    using Error::Error;
};

// iterative scheme failed to converge
struct ConvergenceError : Error {
    using Error::Error;
};

// input size outside the supported range
struct SizeError : Error {
    using Error::Error;
};

// a stated precondition does not hold
struct PreconditionError : Error {
    using Error::Error;
};

// malformed run configuration (CLI / JSON)
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace pertlab
