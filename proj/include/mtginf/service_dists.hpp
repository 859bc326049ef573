#pragma once

#include "mtginf/quadrature.hpp"

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mtginf {

struct Exponential {
    double mu = 1.0;  // rate
};

struct Deterministic {
    double delta = 1.0;
};

struct Atom {
    double p = 0.0;
    double delta = 0.0;
};

/// Finitely many deterministic durations. Built by make_discrete, which merges
/// duplicate durations and sorts atoms by duration.
struct Discrete {
    std::vector<Atom> atoms;
};

struct Branch {
    double p = 0.0;
    double mu = 1.0;
};

struct HyperExponential {
    std::vector<Branch> branches;
};

/// Survival function given on a grid and linearly interpolated between nodes.
class Tabulated {
public:
    /// grid: 0 = t_0 < ... < t_n; survival: nonincreasing, 1 at t_0, 0 at t_n.
    Tabulated(std::vector<double> grid, std::vector<double> survival);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& survival() const { return survival_; }

    double survival_at(double t) const;
    /// Integral of the survival function over [0, t]; exact for the interpolant.
    double integrated_survival(double t) const;
    double mean() const { return mean_; }
    double second_moment() const { return second_moment_; }

private:
    std::vector<double> grid_;
    std::vector<double> survival_;
    std::vector<double> cumulative_;  // integral of survival up to each node
    double mean_ = 0.0;
    double second_moment_ = 0.0;
};

using ServiceModel = std::variant<Exponential, Deterministic, Discrete, HyperExponential, Tabulated>;

Exponential make_exponential(double mu);
Deterministic make_deterministic(double delta);
Discrete make_discrete(std::vector<Atom> atoms);
HyperExponential make_hyperexponential(std::vector<Branch> branches);
/// Reads a two-column `t,survival` CSV (header row optional).
Tabulated load_tabulated_csv(const std::string& path);

void validate(const ServiceModel& s);

double mean(const ServiceModel& s);
double second_moment(const ServiceModel& s);
double survival(const ServiceModel& s, double t);

/// Mixture weights of the stationary excess of a hyper-exponential law:
/// alpha_j proportional to p_j / mu_j.
std::vector<double> excess_mixture_weights(const HyperExponential& h);

/// Locations where an integrand has kinks or narrow features. The expectation
/// engine splits its first pass there; purely a numerical aid.
struct IntegrandHints {
    std::vector<double> breakpoints;
};

/// Law of the stationary excess S_e with cdf G_e(t) = (1/E[S]) int_0^t Gbar(u) du.
class ExcessLaw {
public:
    explicit ExcessLaw(ServiceModel service);

    const ServiceModel& service() const { return service_; }
    double cdf(double t) const;
    double density(double t) const;
    /// E[S_e] = E[S^2] / (2 E[S]).
    double mean() const;

    /// E[f(S_e)]. Throws NumericError when the quadrature misses its tolerance.
    double expectation(const std::function<double(double)>& f, const IntegrandHints& hints = {}) const;

private:
    ServiceModel service_;
};

double excess_expectation(const ServiceModel& s, const std::function<double(double)>& f,
                          const IntegrandHints& hints = {});

}  // namespace mtginf
