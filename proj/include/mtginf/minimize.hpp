#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mtginf {

struct NelderMeadOptions {
    double x_tol = 1e-10;      // simplex diameter, relative to max(1, |x|)
    double f_tol = 0.0;        // absolute spread of simplex values
    int max_iterations = 20000;
    double initial_step = 0.1;  // relative perturbation of each coordinate
};

struct MinimizeResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

MinimizeResult nelder_mead(const std::function<double(std::span<const double>)>& objective, std::vector<double> start,
                           const NelderMeadOptions& options = {});

}  // namespace mtginf
