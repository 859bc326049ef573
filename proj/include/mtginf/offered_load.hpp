#pragma once

#include "mtginf/arrival_rates.hpp"
#include "mtginf/service_dists.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mtginf {

enum class Provenance { closed_form, quadrature };

const char* to_string(Provenance p);

struct LoadPoint {
    double value = 0.0;
    Provenance provenance = Provenance::quadrature;
};

/// Mean offered load sampled on a caller-supplied grid.
struct LoadCurve {
    std::vector<double> grid;
    std::vector<double> values;
    Provenance provenance = Provenance::quadrature;
};

/// q(t) = E[lambda(t - S_e)] * E[S], always through the excess-expectation engine.
double mean_load(const ArrivalModel& a, const ServiceModel& s, double t);

/// Integrand hints for expectations of functions of t - S_e under arrival model a.
IntegrandHints load_hints(const ArrivalModel& a, double t);

// Gaussian closed forms (all centred at tau).
double load_gauss_exp(const GaussianRate& g, double mu, double t);
double load_gauss_det(const GaussianRate& g, double delta, double t);
double load_gauss_discrete(const GaussianRate& g, const Discrete& atoms, double t);
double load_gauss_hyperexp(const GaussianRate& g, const HyperExponential& branches, double t);

/// Closed form when one exists for the (arrival, service) pair, otherwise the generic path.
LoadPoint evaluate_load(const ArrivalModel& a, const ServiceModel& s, double t);
bool has_closed_form(const ArrivalModel& a, const ServiceModel& s);

LoadCurve load_curve(const ArrivalModel& a, const ServiceModel& s, std::span<const double> grid);

/// Shape-free upper bound on q: peak_rate_bound(a) * E[S].
double load_bound(const ArrivalModel& a, const ServiceModel& s);

/// The count in system at time t is Poisson with this mean.
class PoissonMarginal {
public:
    explicit PoissonMarginal(double mean);
    double mean() const { return mean_; }
    double variance() const { return mean_; }
    double pmf(std::int64_t k) const;
    double cdf(std::int64_t k) const;
    /// Smallest k with cdf(k) >= p.
    std::int64_t quantile(double p) const;

private:
    double mean_;
};

PoissonMarginal marginal_at(const ArrivalModel& a, const ServiceModel& s, double t);

/// lambda(t) - mu q - dq/dt, with dq/dt by central differences of the load curve.
double ode_residual(const ArrivalModel& a, const Exponential& s, double t, double q);

}  // namespace mtginf
