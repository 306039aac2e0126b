#pragma once

#include <stdexcept>
#include <string>

namespace ellsys {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (tensor dims, matrix sizes, grids).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Non-finite or out-of-range input data.
class InputError : public Error {
public:
    using Error::Error;
};

/// A parameter lies outside the domain of a closed-form expression.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The anchor tensor annihilates a rank-one direction, or F is not near it.
class NonEllipticError : public Error {
public:
    using Error::Error;
};

class UnsupportedExponentError : public Error {
public:
    using Error::Error;
};

/// A user-supplied pointwise evaluator failed or returned garbage.
class EvaluationError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class SizeCapError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace ellsys
