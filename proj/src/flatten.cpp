#include "mtginf/flatten.hpp"

#include "mtginf/normal.hpp"
#include "mtginf/offered_load.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtginf {

FlattenSolution sigma_star(double lambda_star, double mean_service, double capacity)
{
    if (!(lambda_star > 0.0) || !(mean_service > 0.0) || !(capacity > 0.0))
        throw std::invalid_argument("flatten: lambda*, E[S] and capacity must be > 0");
    FlattenSolution f;
    f.capacity = capacity;
    f.sigma_star = lambda_star * mean_service / (capacity * normal::sqrt_2pi);
    f.implied_bound = lambda_star * mean_service / (f.sigma_star * normal::sqrt_2pi);
    return f;
}

double gamma_capacity_spread(double lambda_star, double alpha, double mean_service, double capacity)
{
    if (!(lambda_star > 0.0) || !(mean_service > 0.0) || !(capacity > 0.0))
        throw std::invalid_argument("flatten: lambda*, E[S] and capacity must be > 0");
    if (!(alpha >= 1.0)) throw std::invalid_argument("flatten: alpha must be >= 1");
    const double load = lambda_star * mean_service;
    if (alpha == 1.0) return capacity / load;
    const double k = alpha - 1.0;
    // bound = load * beta * k^k e^-k / Gamma(alpha)
    const double log_factor = k * std::log(k) - k - boost::math::lgamma(alpha);
    return capacity / load * std::exp(-log_factor);
}

long round_half_up(double x) { return static_cast<long>(std::floor(x + 0.5)); }

ReductionReport reduction_report(const PeakReport& base, const PeakReport& flat)
{
    if (!(base.rate_peak > 0.0) || !(base.q_star > 0.0))
        throw std::invalid_argument("reduction: base scenario must have positive peaks");
    ReductionReport r;
    r.arrival_reduction = 100.0 * (1.0 - flat.rate_peak / base.rate_peak);
    r.queue_reduction = 100.0 * (1.0 - flat.q_star / base.q_star);
    r.arrival_percent = round_half_up(r.arrival_reduction);
    r.queue_percent = round_half_up(r.queue_reduction);
    return r;
}

double max_load_on_grid(const ArrivalModel& a, const ServiceModel& s, double lo, double hi, int n)
{
    if (n < 2 || !(hi > lo)) throw std::invalid_argument("grid: need n >= 2 and hi > lo");
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = lo + (hi - lo) * i / (n - 1);
        best = std::max(best, evaluate_load(a, s, t).value);
    }
    return best;
}

}  // namespace mtginf
