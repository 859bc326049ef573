#include "mtginf/offered_load.hpp"

#include "mtginf/detail/overloaded.hpp"
#include "mtginf/normal.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace mtginf {

using detail::overloaded;

const char* to_string(Provenance p) { return p == Provenance::closed_form ? "closed_form" : "quadrature"; }

IntegrandHints load_hints(const ArrivalModel& a, double t)
{
    IntegrandHints h;
    const double centre = t - mode_time(a);
    const double width = spread(a);
    for (double k : {-8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double u = centre + k * width;
        if (u > 0.0) h.breakpoints.push_back(u);
    }
    if (std::holds_alternative<GammaRate>(a) && t > 0.0) {
        // support edge of lambda(t - u)
        h.breakpoints.push_back(t);
    }
    return h;
}

double mean_load(const ArrivalModel& a, const ServiceModel& s, double t)
{
    if (std::holds_alternative<GammaRate>(a) && t <= 0.0) return 0.0;
    const double e = excess_expectation(
        s, [&](double u) { return rate_at(a, t - u); }, load_hints(a, t));
    return e * mean(s);
}

double load_gauss_exp(const GaussianRate& g, double mu, double t)
{
    const double x = t - g.tau;
    const double ms = mu * g.sigma;
    const double log_q = std::log(g.lambda_star) - mu * x + 0.5 * ms * ms + normal::log_cdf(x / g.sigma - ms);
    return std::exp(log_q);
}

double load_gauss_det(const GaussianRate& g, double delta, double t)
{
    const double hi = (t - g.tau) / g.sigma;
    const double lo = (t - g.tau - delta) / g.sigma;
    if (lo > 0.0) return g.lambda_star * (normal::ccdf(lo) - normal::ccdf(hi));
    return g.lambda_star * (normal::cdf(hi) - normal::cdf(lo));
}

double load_gauss_discrete(const GaussianRate& g, const Discrete& atoms, double t)
{
    double q = 0.0;
    for (const Atom& a : atoms.atoms) q += a.p * load_gauss_det(g, a.delta, t);
    return q;
}

double load_gauss_hyperexp(const GaussianRate& g, const HyperExponential& branches, double t)
{
    double q = 0.0;
    for (const Branch& b : branches.branches) q += b.p * load_gauss_exp(g, b.mu, t);
    return q;
}

bool has_closed_form(const ArrivalModel& a, const ServiceModel& s)
{
    return std::holds_alternative<GaussianRate>(a) && !std::holds_alternative<Tabulated>(s);
}

LoadPoint evaluate_load(const ArrivalModel& a, const ServiceModel& s, double t)
{
    if (const auto* g = std::get_if<GaussianRate>(&a)) {
        const auto closed = std::visit(
            overloaded{
                [&](const Exponential& e) -> std::optional<double> { return load_gauss_exp(*g, e.mu, t); },
                [&](const Deterministic& d) -> std::optional<double> { return load_gauss_det(*g, d.delta, t); },
                [&](const Discrete& d) -> std::optional<double> { return load_gauss_discrete(*g, d, t); },
                [&](const HyperExponential& h) -> std::optional<double> { return load_gauss_hyperexp(*g, h, t); },
                [](const Tabulated&) -> std::optional<double> { return std::nullopt; },
            },
            s);
        if (closed) return {*closed, Provenance::closed_form};
    }
    return {mean_load(a, s, t), Provenance::quadrature};
}

LoadCurve load_curve(const ArrivalModel& a, const ServiceModel& s, std::span<const double> grid)
{
    validate(a);
    validate(s);
    LoadCurve curve;
    curve.grid.assign(grid.begin(), grid.end());
    curve.values.reserve(grid.size());
    curve.provenance = has_closed_form(a, s) ? Provenance::closed_form : Provenance::quadrature;
    for (double t : grid) curve.values.push_back(evaluate_load(a, s, t).value);
    return curve;
}

double load_bound(const ArrivalModel& a, const ServiceModel& s) { return peak_rate_bound(a) * mean(s); }

PoissonMarginal::PoissonMarginal(double mean)
    : mean_(mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("poisson marginal: mean must be >= 0");
}

double PoissonMarginal::pmf(std::int64_t k) const
{
    if (k < 0) return 0.0;
    if (mean_ == 0.0) return k == 0 ? 1.0 : 0.0;
    const double kd = static_cast<double>(k);
    return std::exp(kd * std::log(mean_) - mean_ - boost::math::lgamma(kd + 1.0));
}

double PoissonMarginal::cdf(std::int64_t k) const
{
    if (k < 0) return 0.0;
    if (mean_ == 0.0) return 1.0;
    return boost::math::gamma_q(static_cast<double>(k) + 1.0, mean_);
}

std::int64_t PoissonMarginal::quantile(double p) const
{
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("poisson quantile: p must be in [0, 1]");
    if (mean_ == 0.0) return 0;
    if (p == 1.0) return std::numeric_limits<std::int64_t>::max();
    std::int64_t k = 0;
    double acc = pmf(0);
    while (acc < p) {
        ++k;
        acc += pmf(k);
        if (k > 100000000) break;
    }
    return k;
}

PoissonMarginal marginal_at(const ArrivalModel& a, const ServiceModel& s, double t)
{
    return PoissonMarginal(evaluate_load(a, s, t).value);
}

double ode_residual(const ArrivalModel& a, const Exponential& s, double t, double q)
{
    const double h = 1e-5 * std::max(1.0, std::abs(t));
    const ServiceModel service = s;
    const double dq = (evaluate_load(a, service, t + h).value - evaluate_load(a, service, t - h).value) / (2.0 * h);
    return rate_at(a, t) - s.mu * q - dq;
}

}  // namespace mtginf
