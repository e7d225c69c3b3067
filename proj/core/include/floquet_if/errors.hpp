// errors.hpp — Exception types raised across the library

#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or extents that do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid user input (non-Hermitian operators, bad density matrices, NaN entries, ...).
class InputError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Iterative routine failed to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Memory budget exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

class FitQualityError : public Error {
public:
    using Error::Error;
};

/// A structural property that must hold did not (e.g. missing unit Floquet eigenvalue).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Connected correlation did not decay within the allowed memory time.
class MemoryTimeError : public Error {
public:
    using Error::Error;
};

class StepSizeError : public Error {
public:
    using Error::Error;
};

class UnsupportedConfigurationError : public Error {
public:
    using Error::Error;
};

}  // namespace floquet
