#pragma once

#include <stdexcept>
#include <string>

namespace choquard {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid parameter (outside the domain of definition).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// An integral diverges; carries the endpoint exponent that violates integrability.
class DivergentIntegralError : public Error {
public:
    DivergentIntegralError(const std::string& msg, double exponent, bool at_origin)
        : Error(msg), exponent(exponent), at_origin(at_origin) {}
    double exponent;
    bool at_origin;
};

/// The Riesz potential of a profile diverges. This error is load-bearing: in
/// the nonexistence region it is the numerical witness that alpha + tau_{j0} p >= 0.
class DivergentRieszError : public Error {
public:
    DivergentRieszError(const std::string& msg, double tail_exponent, double alpha)
        : Error(msg), tail_exponent(tail_exponent), alpha(alpha) {}
    double tail_exponent;
    double alpha;
};

/// Power-law fit could not be performed (short window or nonpositive data).
class FitError : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside a solver (singular system, broken invariant).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Operation requested outside the exponent region it is defined for.
class RegionError : public Error {
public:
    using Error::Error;
};

/// Verification analytics could not be computed (e.g. fitting window too short).
class AnalysisError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace choquard
