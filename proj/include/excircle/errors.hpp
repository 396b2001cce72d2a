#pragma once

#include <stdexcept>
#include <string>

namespace excircle {

/// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A required property of an input (e.g. conductivity type) does not hold.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Evaluation at a singular point (Ei at 0, g1 at the origin).
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The radial Dirichlet problem is (near) singular: zero is a Dirichlet
/// eigenvalue of -Delta + q for the requested angular mode.
class PoleError : public std::runtime_error {
public:
    PoleError(int mode, double boundary_value)
        : std::runtime_error("Dirichlet eigenvalue hit for mode " + std::to_string(mode)
                             + " (unscaled boundary value " + std::to_string(boundary_value) + ")"),
          mode_(mode),
          boundary_value_(boundary_value) {}

    int mode() const noexcept { return mode_; }
    double boundary_value() const noexcept { return boundary_value_; }

private:
    int mode_;
    double boundary_value_;
};

}  // namespace excircle
