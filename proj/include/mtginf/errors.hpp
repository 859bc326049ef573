#pragma once

#include <stdexcept>
#include <string>

namespace mtginf {

// Invalid parameters are reported with std::invalid_argument. The two types
// below cover failures that are not the caller's fault.

/// An iterative method (quadrature, root finder, fixed point) did not reach
/// its tolerance. `residual` is the best achieved error measure.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mtginf
