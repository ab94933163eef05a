#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace canard {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is the 0-based offset of the offending character.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Argument outside the domain of an operation (branch height, section interval, ...).
class RangeError : public Error {
public:
    using Error::Error;
};

/// A system or configuration that fails the standing assumptions.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Evaluation hit a removable-only-at-zero singularity or a division by zero.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Quadrature, root finding or cross-check tolerance not met.
class NumericError : public Error {
public:
    using Error::Error;
};

class BracketError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Adaptive integrator could not make progress; carries the last accepted state.
class StiffnessError : public NumericError {
public:
    StiffnessError(const std::string& what, double t, std::array<double, 2> state)
        : NumericError(what), t_(t), state_(state) {}
    double time() const noexcept { return t_; }
    std::array<double, 2> state() const noexcept { return state_; }

private:
    double t_;
    std::array<double, 2> state_;
};

}  // namespace canard
