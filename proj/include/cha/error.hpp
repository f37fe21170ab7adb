#pragma once

#include <stdexcept>
#include <string>

namespace cha {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Iterative procedure did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Discretization too coarse to represent the requested state.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Eigenvector has the wrong number of radial nodes for the requested state.
class WrongBranchError : public Error {
public:
    using Error::Error;
};

/// Panel quadrature failed to settle under refinement.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Input violates a documented precondition (e.g. unnormalized density).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Momentum grid cutoff leaves too much density beyond p_max.
class CutoffError : public Error {
public:
    CutoffError(const std::string& what, double suggested_p_max)
        : Error(what), suggested_p_max_(suggested_p_max) {}
    double suggested_p_max() const noexcept { return suggested_p_max_; }

private:
    double suggested_p_max_;
};

/// Invalid user configuration (bad state label, missing golden file, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cha
