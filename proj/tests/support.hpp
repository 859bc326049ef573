#pragma once

// Shared fixtures and independent oracles for the test binaries. The oracles
// use boost quadrature so they share no code with the library's own rules.

#include "mtginf/normal.hpp"
#include "mtginf/peak_analysis.hpp"
#include "mtginf/service_dists.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testing {

/// Exponential survival on a uniform grid, truncated to 0 at the last node.
inline mtginf::Tabulated tabulated_exponential(double mu, double step, double horizon)
{
    std::vector<double> t;
    std::vector<double> s;
    const auto n = static_cast<int>(std::lround(horizon / step));
    for (int i = 0; i <= n; ++i) {
        t.push_back(i * step);
        s.push_back(i == n ? 0.0 : std::exp(-mu * i * step));
    }
    return mtginf::Tabulated(t, s);
}

/// Integral of f on [a, b] with interior cut points, by adaptive 61-point
/// Gauss-Kronrod per piece. Tighter relative tolerances stall on roundoff.
inline double oracle_integral(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts = {})
{
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(a, cuts[i]);
        const double hi = std::min(b, cuts[i + 1]);
        if (hi > lo) acc += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-11);
    }
    return acc;
}

/// E[f(S_e)] straight from the definition: integral of f(u) Gbar(u) / E[S].
inline double oracle_excess(const mtginf::ServiceModel& s, const std::function<double(double)>& f,
                            std::vector<double> cuts = {})
{
    const double m = mtginf::mean(s);
    auto g = [&](double u) { return f(u) * mtginf::survival(s, u) / m; };
    double upper = 0.0;
    if (const auto* d = std::get_if<mtginf::Deterministic>(&s)) upper = d->delta;
    if (const auto* d = std::get_if<mtginf::Discrete>(&s)) {
        upper = d->atoms.back().delta;
        for (const auto& a : d->atoms) cuts.push_back(a.delta);
    }
    if (const auto* t = std::get_if<mtginf::Tabulated>(&s)) {
        upper = t->grid().back();
        cuts.insert(cuts.end(), t->grid().begin(), t->grid().end());
    }
    if (upper > 0.0) return oracle_integral(g, 0.0, upper, cuts);
    // exponential tails: finite part with cuts, then exp_sinh for the rest
    double split = 0.0;
    for (double c : cuts) split = std::max(split, c);
    split = std::max(split, 1.0);
    boost::math::quadrature::exp_sinh<double> es;
    return oracle_integral(g, 0.0, split, cuts) + es.integrate(g, split, INFINITY);
}

/// The two exponential-kernel expectations of stein_expectations, by quadrature.
inline mtginf::SteinExpectations oracle_stein(double mu, double sigma, double ell)
{
    auto w = [&](double x) { return mtginf::normal::pdf((ell - x / mu) / sigma) * std::exp(-x); };
    auto m = [&](double x) { return (x / mu) * mtginf::normal::pdf((ell - x / mu) / sigma) * std::exp(-x); };
    const double centre = std::max(0.0, mu * ell);
    const double half = 12.0 * mu * sigma;
    std::vector<double> cuts{centre, centre + half};
    if (centre - half > 0.0) cuts.push_back(centre - half);
    const double split = centre + half + 1.0;
    boost::math::quadrature::exp_sinh<double> es;
    mtginf::SteinExpectations r;
    r.weight = oracle_integral(w, 0.0, split, cuts) + es.integrate(w, split, INFINITY);
    r.moment = oracle_integral(m, 0.0, split, cuts) + es.integrate(m, split, INFINITY);
    return r;
}


}  // namespace testing
