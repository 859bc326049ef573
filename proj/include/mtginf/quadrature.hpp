#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace mtginf {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // achieved absolute error estimate
    std::size_t evaluations = 0;
    bool converged = false;
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    std::size_t max_intervals = 4000;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]. Interior breakpoints
/// seed the initial partition; use them to mark kinks or narrow features the
/// first pass could otherwise step over. Breakpoints outside (a, b) are ignored.
QuadratureResult integrate_gk(const Integrand& f, double a, double b, std::span<const double> breakpoints = {},
                              const QuadratureOptions& options = {});

/// Adaptive Simpson with Richardson correction, run panel by panel over the
/// partition induced by the breakpoints. The absolute tolerance is shared
/// across panels in proportion to their width.
QuadratureResult integrate_simpson(const Integrand& f, double a, double b, std::span<const double> breakpoints = {},
                                   double abs_tol = 1e-9, std::size_t max_subdivisions = std::size_t{1} << 20);

}  // namespace mtginf
