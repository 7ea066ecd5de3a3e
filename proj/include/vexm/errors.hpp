#pragma once

#include <stdexcept>
#include <string>

namespace vexm {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point lies outside the domain it was evaluated on.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters: unsupported dimension, gamma outside (0, n), missing keys.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Exponent too close to 1 (or otherwise unusable) for the requested operation.
class DegenerateExponentError : public Error {
public:
    using Error::Error;
};

/// A derived exponent is not a finite exponent at some node.
class InadmissibleExponentError : public Error {
public:
    using Error::Error;
};

/// Root finding failed to converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Grid functions defined on different grids were combined.
class ShapeError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace vexm
