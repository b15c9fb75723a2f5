#pragma once

#include <stdexcept>
#include <string>

namespace sqg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was not met.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Improper integral whose tail does not converge for the supplied modulus.
class DivergentTail : public Error {
public:
    using Error::Error;
};

/// Operation requires a concave modulus of continuity.
class NonConcaveModulus : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

}  // namespace sqg
