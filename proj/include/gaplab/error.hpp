#pragma once

#include <stdexcept>
#include <string>

namespace gaplab {

// Base of every error the library throws. The CLI maps the subclasses onto
// stable exit codes (domain-type errors -> 3, I/O -> 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Residue class not H-allowed, or otherwise unable to hold P_c.
class InvalidClass : public Error {
public:
    using Error::Error;
};

// Argument outside the representable 63-bit range.
class RangeError : public Error {
public:
    using Error::Error;
};

// Argument outside a function's mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gaplab
