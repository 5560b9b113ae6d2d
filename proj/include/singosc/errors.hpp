#pragma once

#include <stdexcept>

namespace singosc {

// Invalid parameters or malformed configuration. CLI maps this to exit code 1.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation could not meet its accuracy contract (integrator step
// underflow, tail cap bound, overflow guard, bad branch). Exit code 2.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be read or written. Exit code 3.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace singosc
