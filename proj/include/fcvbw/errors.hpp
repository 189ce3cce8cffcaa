#pragma once

#include <stdexcept>
#include <string>

namespace fcvbw {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input violates a documented precondition or type invariant.
struct ValidationError : Error {
    using Error::Error;
};

// Requirements do not land on the 2*pi/N bin grid; message carries the
// nearest valid grid spec.
struct OffGridError : ValidationError {
    using ValidationError::ValidationError;
};

struct NonConvergenceError : Error {
    using Error::Error;
};

struct LpError : Error {
    using Error::Error;
};

}  // namespace fcvbw
