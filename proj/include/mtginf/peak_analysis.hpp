#pragma once

#include "mtginf/arrival_rates.hpp"
#include "mtginf/service_dists.hpp"

#include <utility>
#include <vector>

namespace mtginf {

enum class PeakMethod { fixed_point, golden_section, closed_form };

const char* to_string(PeakMethod m);

/// Location and height of the peak of q(t), with the lag behind the arrival-rate
/// mode and a bracket [lower_bound, upper_bound] known to contain t_star.
struct PeakReport {
    double t_star = 0.0;
    double q_star = 0.0;
    double lag = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double rate_peak = 0.0;  // sup of the arrival rate, for reduction reports
    PeakMethod method = PeakMethod::fixed_point;
    int iterations = 0;
    double residual = 0.0;  // |F(t*) - t*| for fixed point, final bracket width otherwise
};

/// Peak of the mean offered load.
///
/// Gaussian arrivals, and Gamma arrivals with alpha >= 2, solve the first-order
/// condition written as t = mode + E[S_e w(t - S_e)] / E[w(t - S_e)] by damped
/// fixed-point iteration (damping 0.5, at most 200 steps). If that does not
/// settle, golden-section search on [mode, mode + 4 (E[S_e] + spread)] takes
/// over and the result is polished by a root solve of the same condition.
/// Gamma arrivals with alpha < 2 go straight to golden-section search.
///
/// Throws NumericError if the maximiser sits on the edge of the search bracket.
PeakReport peak_time(const ArrivalModel& a, const ServiceModel& s);

/// Closed-form peak when one is known: Gaussian x exponential (via psi) and
/// Gaussian x deterministic (tau + delta / 2). Throws std::invalid_argument otherwise.
PeakReport peak_closed_form(const ArrivalModel& a, const ServiceModel& s);

/// Numeric argmax of evaluate_load over [lo, hi] by golden-section search.
double argmax_load(const ArrivalModel& a, const ServiceModel& s, double lo, double hi, double x_tol = 1e-10);

/// tau <= t* <= tau + E[S^2] / (sqrt(8 pi) E[S] E[phi((t* - tau - S_e) / sigma)]).
std::pair<double, double> peak_time_bounds(const GaussianRate& g, const ServiceModel& s, double t_star);
std::pair<double, double> peak_time_bounds(const GaussianRate& g, const ServiceModel& s);

struct PsiValue {
    double x = 0.0;
    double psi_x = 0.0;  // the y with phi(y) / Phi(y) = x
};

/// Functional inverse of the inverse Mills ratio. Requires x > 0.
PsiValue psi(double x);

/// lag = sigma (mu sigma + psi(mu sigma)) for Gaussian arrivals, exponential service.
double exact_lag_gauss_exp(const GaussianRate& g, double mu);

/// (1/mu - 1/(mu^3 sigma^2 + mu), 1/mu).
std::pair<double, double> lag_bounds_exp(double mu, double sigma);

double lag_det(double delta);

/// Lag for Gaussian arrivals with hyper-exponential service.
double lag_hyperexp(const GaussianRate& g, const HyperExponential& branches);

/// With X a unit exponential:
///   weight = E[phi((ell - X/mu) / sigma)]
///   moment = E[(X/mu) phi((ell - X/mu) / sigma)]
struct SteinExpectations {
    double weight = 0.0;
    double moment = 0.0;
};

SteinExpectations stein_expectations(double mu, double sigma, double ell);

}  // namespace mtginf
