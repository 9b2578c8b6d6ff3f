#pragma once

#include <stdexcept>
#include <string>

namespace cdp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lookup of a variable that is not part of the graph.
struct UnknownVariableError : Error {
    using Error::Error;
};

// An operation was called outside its stated preconditions.
struct PreconditionError : Error {
    using Error::Error;
};

// Exact belief update received an observation with zero probability
// under every state in the support.
struct ImpossibleObservationError : Error {
    using Error::Error;
};

// Numeric argument outside its admissible domain.
struct DomainError : Error {
    using Error::Error;
};

// Scenario/benchmark configuration rejected, with field diagnostics.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace cdp
