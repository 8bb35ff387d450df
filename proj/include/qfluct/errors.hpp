#pragma once

#include <stdexcept>
#include <string>

namespace qfluct {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input (state specs, operator names, config documents).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Arguments that do not fit together: grid/field mismatches, operators used
/// off their domain, out-of-range parameters.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A physical validity constraint is violated (e.g. a channel whose current
/// kernel is too wide for the packet it acts on).
class ValidityError : public Error {
public:
    using Error::Error;
};

}  // namespace qfluct
