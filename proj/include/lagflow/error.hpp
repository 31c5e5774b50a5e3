#pragma once

#include <stdexcept>
#include <string>

namespace lagflow {

// Caller handed us something outside an operation's domain.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An algorithm failed on valid input (non-convergence, lost definiteness, non-finite state).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lagflow
