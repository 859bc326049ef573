#pragma once

#include <variant>

namespace mtginf {

/// lambda(t) = lambda_star / sigma * phi((t - tau) / sigma) on the whole real line.
struct GaussianRate {
    double lambda_star = 0.0;  // expected total arrivals
    double tau = 0.0;          // mode
    double sigma = 1.0;        // spread
};

/// lambda(t) = lambda_star * beta^alpha t^(alpha-1) e^(-beta t) / Gamma(alpha), t >= 0.
/// beta is a rate (1/time), not a scale.
struct GammaRate {
    double lambda_star = 0.0;
    double alpha = 1.0;  // shape, >= 1
    double beta = 1.0;   // rate
};

using ArrivalModel = std::variant<GaussianRate, GammaRate>;

// Validating constructors; throw std::invalid_argument.
GaussianRate make_gaussian_rate(double lambda_star, double tau, double sigma);
GammaRate make_gamma_rate(double lambda_star, double alpha, double beta);

void validate(const ArrivalModel& model);

double rate_at(const ArrivalModel& model, double t);

/// d lambda / dt. For Gamma with alpha < 2 this is unbounded near t = 0.
double rate_derivative(const ArrivalModel& model, double t);

/// argmax of rate_at: tau, or (alpha - 1) / beta.
double mode_time(const ArrivalModel& model);

/// sup_t lambda(t). Rejects Gamma with alpha < 1, where the rate is unbounded.
double peak_rate_bound(const ArrivalModel& model);

/// Standard deviation of the normalized rate: sigma, or sqrt(alpha) / beta.
double spread(const ArrivalModel& model);

/// Expected arrivals in [a, b].
double expected_arrivals(const ArrivalModel& model, double a, double b);

/// Lower end of the support (-inf for Gaussian, 0 for Gamma).
double support_start(const ArrivalModel& model);

double total_arrivals(const ArrivalModel& model);

ArrivalModel scaled(const ArrivalModel& model, double factor);

}  // namespace mtginf
