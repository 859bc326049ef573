#pragma once

#include <functional>

namespace mtginf {

struct GoldenResult {
    double x = 0.0;
    double fx = 0.0;
    double lo = 0.0;  // final bracket
    double hi = 0.0;
    int iterations = 0;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
GoldenResult golden_section_max(const std::function<double(double)>& f, double lo, double hi, double x_tol,
                                int max_iterations = 300);

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Brent's method. f(a) and f(b) must have opposite signs (or one be zero);
/// throws std::invalid_argument otherwise.
RootResult brent_root(const std::function<double(double)>& f, double a, double b, double x_tol,
                      int max_iterations = 300);

}  // namespace mtginf
