#pragma once

#include <stdexcept>
#include <string>

namespace nmshrink {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input (bad dimensions, nonpositive r, bad CSV).
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not deliver a trustworthy value.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A propriety or dominance precondition does not hold.
class ConditionViolation : public Error {
public:
    using Error::Error;
};

inline void require_input(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

inline void require_condition(bool ok, const std::string& what) {
    if (!ok) throw ConditionViolation(what);
}

}  // namespace nmshrink
