#include "mtginf/arrival_rates.hpp"

#include "mtginf/detail/overloaded.hpp"
#include "mtginf/normal.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mtginf {

namespace {

using detail::overloaded;

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

double log_gamma_prefactor(const GammaRate& g)
{
    return std::log(g.lambda_star) + g.alpha * std::log(g.beta) - boost::math::lgamma(g.alpha);
}

}  // namespace

GaussianRate make_gaussian_rate(double lambda_star, double tau, double sigma)
{
    GaussianRate g{lambda_star, tau, sigma};
    validate(g);
    return g;
}

GammaRate make_gamma_rate(double lambda_star, double alpha, double beta)
{
    GammaRate g{lambda_star, alpha, beta};
    validate(g);
    return g;
}

void validate(const ArrivalModel& model)
{
    std::visit(overloaded{
                   [](const GaussianRate& g) {
                       if (!positive(g.lambda_star)) throw std::invalid_argument("gaussian rate: lambda_star must be > 0");
                       if (!std::isfinite(g.tau)) throw std::invalid_argument("gaussian rate: tau must be finite");
                       if (!positive(g.sigma)) throw std::invalid_argument("gaussian rate: sigma must be > 0");
                   },
                   [](const GammaRate& g) {
                       if (!positive(g.lambda_star)) throw std::invalid_argument("gamma rate: lambda_star must be > 0");
                       if (!(std::isfinite(g.alpha) && g.alpha >= 1.0))
                           throw std::invalid_argument("gamma rate: alpha must be >= 1");
                       if (!positive(g.beta)) throw std::invalid_argument("gamma rate: beta must be > 0");
                   },
               },
               model);
}

double rate_at(const ArrivalModel& model, double t)
{
    return std::visit(overloaded{
                          [t](const GaussianRate& g) {
                              return g.lambda_star / g.sigma * normal::pdf((t - g.tau) / g.sigma);
                          },
                          [t](const GammaRate& g) {
                              if (t < 0.0) return 0.0;
                              if (t == 0.0) return g.alpha == 1.0 ? g.lambda_star * g.beta : 0.0;
                              return std::exp(log_gamma_prefactor(g) + (g.alpha - 1.0) * std::log(t) - g.beta * t);
                          },
                      },
                      model);
}

double rate_derivative(const ArrivalModel& model, double t)
{
    return std::visit(overloaded{
                          [&](const GaussianRate& g) {
                              const double z = (t - g.tau) / g.sigma;
                              return -rate_at(model, t) * z / g.sigma;
                          },
                          [&](const GammaRate& g) {
                              if (t <= 0.0) return 0.0;
                              return rate_at(model, t) * ((g.alpha - 1.0) / t - g.beta);
                          },
                      },
                      model);
}

double mode_time(const ArrivalModel& model)
{
    return std::visit(overloaded{
                          [](const GaussianRate& g) { return g.tau; },
                          [](const GammaRate& g) { return (g.alpha - 1.0) / g.beta; },
                      },
                      model);
}

double peak_rate_bound(const ArrivalModel& model)
{
    return std::visit(overloaded{
                          [](const GaussianRate& g) { return g.lambda_star / (g.sigma * normal::sqrt_2pi); },
                          [](const GammaRate& g) {
                              if (!(g.alpha >= 1.0)) {
                                  throw std::invalid_argument("peak_rate_bound: gamma rate is unbounded for alpha < 1");
                              }
                              const double am1 = g.alpha - 1.0;
                              // (alpha-1)^(alpha-1) -> 1 as alpha -> 1
                              const double log_pow = am1 > 0.0 ? am1 * std::log(am1) : 0.0;
                              return std::exp(std::log(g.lambda_star) + std::log(g.beta) + log_pow - am1 -
                                              boost::math::lgamma(g.alpha));
                          },
                      },
                      model);
}

double spread(const ArrivalModel& model)
{
    return std::visit(overloaded{
                          [](const GaussianRate& g) { return g.sigma; },
                          [](const GammaRate& g) { return std::sqrt(g.alpha) / g.beta; },
                      },
                      model);
}

double expected_arrivals(const ArrivalModel& model, double a, double b)
{
    if (!(a <= b)) return 0.0;
    return std::visit(overloaded{
                          [=](const GaussianRate& g) {
                              const double za = (a - g.tau) / g.sigma;
                              const double zb = (b - g.tau) / g.sigma;
                              if (za > 0.0) return g.lambda_star * (normal::ccdf(za) - normal::ccdf(zb));
                              return g.lambda_star * (normal::cdf(zb) - normal::cdf(za));
                          },
                          [=](const GammaRate& g) {
                              const double lo = std::max(a, 0.0);
                              if (b <= lo) return 0.0;
                              const double xa = g.beta * lo;
                              const double xb = std::isinf(b) ? std::numeric_limits<double>::infinity() : g.beta * b;
                              const double q_lo = boost::math::gamma_q(g.alpha, xa);
                              const double q_hi = std::isinf(xb) ? 0.0 : boost::math::gamma_q(g.alpha, xb);
                              return g.lambda_star * (q_lo - q_hi);
                          },
                      },
                      model);
}

double support_start(const ArrivalModel& model)
{
    return std::holds_alternative<GammaRate>(model) ? 0.0 : -std::numeric_limits<double>::infinity();
}

double total_arrivals(const ArrivalModel& model)
{
    return std::visit([](const auto& m) { return m.lambda_star; }, model);
}

ArrivalModel scaled(const ArrivalModel& model, double factor)
{
    return std::visit(
        [factor](auto m) -> ArrivalModel {
            m.lambda_star *= factor;
            return m;
        },
        model);
}

}  // namespace mtginf
