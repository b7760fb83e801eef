#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fundtone {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the inputs of an operation does not hold.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A point does not satisfy the constraint of its space-form model.
class InvalidPointError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The tensor field of a divergence-form operator is not positive definite.
class EllipticityError : public DomainError {
public:
    using DomainError::DomainError;
};

class AssemblyError : public Error {
public:
    using Error::Error;
};

/// Factorization or iteration failure in the eigensolver.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::vector<double> best_residuals = {})
        : Error(what), best_residuals_(std::move(best_residuals)) {}

    const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

private:
    std::vector<double> best_residuals_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fundtone
