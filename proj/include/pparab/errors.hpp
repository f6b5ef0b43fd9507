#pragma once

#include <stdexcept>
#include <string>

namespace pparab {

/// A parameter or argument lies outside its admissible range.
/// `field()` names the offending quantity ("p", "gamma", "theta", ...).
class RangeError : public std::domain_error {
public:
    RangeError(std::string field, const std::string& message)
        : std::domain_error(message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A stencil was requested at a node without a full neighbourhood.
class BoundaryError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A normalized quantity was requested for a vanishing gradient.
class ZeroGradient : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The explicit integrator produced a non-finite value.
class BlowupError : public std::runtime_error {
public:
    BlowupError(double time, const std::string& message)
        : std::runtime_error(message), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Reading or writing an artifact failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time index outside a trajectory.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

} // namespace pparab
