#pragma once

#include <stdexcept>
#include <string>

namespace renyi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// derivative_at was asked for a value at a piece boundary.
class BreakpointDerivative : public Error {
public:
    using Error::Error;
};

class NegativeDensity : public Error {
public:
    using Error::Error;
};

class MismatchedSpacing : public Error {
public:
    using Error::Error;
};

class AsymmetricGrid : public Error {
public:
    using Error::Error;
};

/// The integral of f^p vanished, so the entropy is undefined.
class DegenerateDensity : public Error {
public:
    using Error::Error;
};

class ZeroMass : public Error {
public:
    using Error::Error;
};

class NoBracket : public Error {
public:
    using Error::Error;
};

/// The affine renormalization would divide by K(0) - K(1) = 0.
class DegenerateNormalizer : public Error {
public:
    using Error::Error;
};

class InfeasibleInput : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace renyi
