#pragma once

#include <stdexcept>
#include <string>

namespace smlp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// QR of a numerically singular matrix. Carries the smallest |R_ii|.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double min_diag)
        : Error(what), min_abs_diagonal(min_diag) {}
    double min_abs_diagonal;
};

/// Backward pass through the polar factor with sigma_i + sigma_j ~ 0.
class IllConditionedGradientError : public Error {
public:
    using Error::Error;
};

class AsymmetricInputError : public Error {
public:
    using Error::Error;
};

class TrainingDivergenceError : public Error {
public:
    using Error::Error;
};

class InvalidInstanceError : public Error {
public:
    using Error::Error;
};

class UnknownInstanceError : public Error {
public:
    using Error::Error;
};

/// Spectral verification requested for a matrix it cannot handle (nonsymmetric).
class UnsupportedVerificationError : public Error {
public:
    using Error::Error;
};

}  // namespace smlp
