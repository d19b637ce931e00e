#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fucik {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shift parameters outside their admissible open intervals.
struct InvalidEps : Error {
    using Error::Error;
};

// Curve construction requested through the kernel eigenvalue.
struct ZeroEigenvalue : Error {
    using Error::Error;
};

// A resolvent divisor fell below the certified margin delta.
struct ConditioningFailure : Error {
    using Error::Error;
};

// Spectrum bound box too small to certify adjacent eigenvalues.
struct NeighborUnresolved : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct IntegratorFailure : Error {
    using Error::Error;
};

// Monotonicity sampling found a witness (s, t, u) breaking a hypothesis.
struct HypothesisViolated : Error {
    double s = 0.0, t = 0.0, u = 0.0;
    HypothesisViolated(const std::string& what, double s_, double t_, double u_)
        : Error(what), s(s_), t(t_), u(u_) {}
};

// Scalar inversion of the convex derivative could not bracket a root.
struct BracketFailure : Error {
    using Error::Error;
};

struct RegionError : Error {
    using Error::Error;
};

struct ParseError : Error {
    std::size_t position = 0;
    ParseError(const std::string& what, std::size_t pos) : Error(what), position(pos) {}
};

}  // namespace fucik
