#include "mtginf/peak_analysis.hpp"

#include "mtginf/errors.hpp"
#include "mtginf/normal.hpp"
#include "mtginf/offered_load.hpp"
#include "mtginf/roots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace mtginf {

namespace {

constexpr double damping = 0.5;
constexpr int max_fixed_point_steps = 200;

template <typename... Args>
std::string fmt(const char* pattern, Args... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

// Weight w with q'(t) proportional to E[w(t - S_e)] (F(t) - t).
std::function<double(double)> peak_weight(const ArrivalModel& a)
{
    if (const auto* g = std::get_if<GaussianRate>(&a)) {
        const double tau = g->tau;
        const double sigma = g->sigma;
        return [tau, sigma](double x) {
            const double z = (x - tau) / sigma;
            return std::exp(-0.5 * z * z);
        };
    }
    const auto& gm = std::get<GammaRate>(a);
    const double k = gm.alpha - 2.0;
    const double beta = gm.beta;
    // normalise at the maximiser so moderate alpha does not underflow
    const double x_max = k > 0.0 ? k / beta : 0.0;
    const double log_max = k > 0.0 ? k * std::log(x_max) - beta * x_max : 0.0;
    return [k, beta, log_max](double x) {
        if (x <= 0.0) return 0.0;
        const double lw = (k == 0.0 ? 0.0 : k * std::log(x)) - beta * x - log_max;
        return std::exp(lw);
    };
}

struct FixedPointMap {
    const ArrivalModel& arrival;
    ExcessLaw law;
    std::function<double(double)> w;
    double mode;

    double operator()(double t) const
    {
        const IntegrandHints hints = load_hints(arrival, t);
        const double den = law.expectation([&](double u) { return w(t - u); }, hints);
        if (!(den > 0.0)) throw NumericError(fmt("peak: weight vanished at t=%.12g (E[w]=%g)", t, den), den);
        const double num = law.expectation([&](double u) { return u * w(t - u); }, hints);
        return mode + num / den;
    }
};

bool fixed_point_applies(const ArrivalModel& a)
{
    if (const auto* gm = std::get_if<GammaRate>(&a)) return gm->alpha >= 2.0;
    return true;
}

// Root of g near x0, searching outward within [lo, hi]. g changes sign from + to -.
std::optional<RootResult> polish(const std::function<double(double)>& g, double x0, double lo, double hi,
                                 double step, double x_tol)
{
    double a = std::max(lo, x0 - step);
    double b = std::min(hi, x0 + step);
    double ga = g(a);
    double gb = g(b);
    for (int i = 0; i < 60 && ga * gb > 0.0; ++i) {
        if (a <= lo && b >= hi) return std::nullopt;
        step *= 2.0;
        if (gb > 0.0) {
            b = std::min(hi, x0 + step);
            gb = g(b);
        }
        if (ga < 0.0) {
            a = std::max(lo, x0 - step);
            ga = g(a);
        }
    }
    if (ga * gb > 0.0) return std::nullopt;
    return brent_root(g, a, b, x_tol);
}

double peak_scale(const ArrivalModel& a, const ServiceModel& s)
{
    return std::max(1.0, std::abs(mode_time(a)) + ExcessLaw(s).mean() + spread(a));
}

}  // namespace

const char* to_string(PeakMethod m)
{
    switch (m) {
    case PeakMethod::fixed_point:
        return "fixed_point";
    case PeakMethod::golden_section:
        return "golden_section";
    case PeakMethod::closed_form:
        return "closed_form";
    }
    return "unknown";
}

double argmax_load(const ArrivalModel& a, const ServiceModel& s, double lo, double hi, double x_tol)
{
    auto q = [&](double t) { return evaluate_load(a, s, t).value; };
    const GoldenResult gr = golden_section_max(q, lo, hi, std::max(x_tol, 1e-8 * (hi - lo)));
    // golden section only resolves x to ~sqrt(eps); sharpen with the root of a
    // short symmetric difference, whose offset from the true argmax is O(h^2)
    const double h = 1e-5 * std::max(1.0, hi - lo);
    auto d = [&](double t) { return q(t + h) - q(t - h); };
    const auto r = polish(d, gr.x, lo + h, hi - h, 4.0 * (gr.hi - gr.lo) + h, x_tol);
    if (r && r->converged) return r->x;
    return gr.x;
}

PeakReport peak_time(const ArrivalModel& a, const ServiceModel& s)
{
    validate(a);
    validate(s);
    const ExcessLaw law(s);
    if (!std::isfinite(law.mean())) throw std::invalid_argument("peak: service second moment must be finite");

    const double mode = mode_time(a);
    const double lo = mode;
    const double hi = mode + 4.0 * (law.mean() + spread(a));
    const double scale = peak_scale(a, s);
    const double tol = 1e-11 * scale;

    PeakReport rep;
    rep.rate_peak = peak_rate_bound(a);
    bool solved = false;

    std::optional<FixedPointMap> map;
    if (fixed_point_applies(a)) {
        map.emplace(FixedPointMap{a, law, peak_weight(a), mode});
        double t = mode + law.mean();
        double res = 0.0;
        for (int i = 1; i <= max_fixed_point_steps; ++i) {
            const double f = (*map)(t);
            res = std::abs(f - t);
            rep.iterations = i;
            if (res <= tol) {
                t = f;
                solved = true;
                break;
            }
            t = (1.0 - damping) * t + damping * f;
        }
        if (solved) {
            rep.t_star = t;
            rep.residual = res;
            rep.method = PeakMethod::fixed_point;
        }
    }

    if (!solved) {
        const GoldenResult gr = golden_section_max([&](double t) { return evaluate_load(a, s, t).value; }, lo, hi,
                                                   1e-9 * scale);
        rep.method = PeakMethod::golden_section;
        rep.iterations += gr.iterations;
        rep.t_star = gr.x;
        rep.residual = gr.hi - gr.lo;
        std::optional<RootResult> r;
        if (map) {
            auto g = [&](double t) { return (*map)(t) - t; };
            r = polish(g, gr.x, lo, hi, 4.0 * (gr.hi - gr.lo) + 1e-6 * scale, tol);
        } else {
            const double h = 1e-5 * scale;
            auto d = [&](double t) { return evaluate_load(a, s, t + h).value - evaluate_load(a, s, t - h).value; };
            r = polish(d, gr.x, lo + h, hi - h, 4.0 * (gr.hi - gr.lo) + h, tol);
        }
        if (r && r->converged) {
            rep.t_star = r->x;
            rep.residual = std::abs(r->fx);
            rep.iterations += r->iterations;
        }
        const double edge = 1e-6 * (hi - lo);
        if (rep.t_star - lo < edge || hi - rep.t_star < edge) {
            throw NumericError(fmt("peak: no interior maximum; last iterate %.12g, bracket [%.12g, %.12g]",
                                   rep.t_star, lo, hi),
                               rep.residual);
        }
    }

    rep.q_star = evaluate_load(a, s, rep.t_star).value;
    rep.lag = rep.t_star - mode;
    if (const auto* g = std::get_if<GaussianRate>(&a)) {
        const auto [lb, ub] = peak_time_bounds(*g, s, rep.t_star);
        rep.lower_bound = lb;
        rep.upper_bound = ub;
    } else {
        rep.lower_bound = lo;
        rep.upper_bound = hi;
    }
    return rep;
}

PeakReport peak_closed_form(const ArrivalModel& a, const ServiceModel& s)
{
    const auto* g = std::get_if<GaussianRate>(&a);
    if (!g) throw std::invalid_argument("peak: no closed form for gamma arrivals");
    validate(a);
    validate(s);
    double lag = 0.0;
    if (const auto* e = std::get_if<Exponential>(&s)) {
        lag = exact_lag_gauss_exp(*g, e->mu);
    } else if (const auto* d = std::get_if<Deterministic>(&s)) {
        lag = lag_det(d->delta);
    } else if (const auto* h = std::get_if<HyperExponential>(&s)) {
        lag = lag_hyperexp(*g, *h);
    } else {
        throw std::invalid_argument("peak: no closed form for this service distribution");
    }
    PeakReport rep;
    rep.method = PeakMethod::closed_form;
    rep.t_star = g->tau + lag;
    rep.lag = lag;
    rep.q_star = evaluate_load(a, s, rep.t_star).value;
    rep.rate_peak = peak_rate_bound(a);
    const auto [lb, ub] = peak_time_bounds(*g, s, rep.t_star);
    rep.lower_bound = lb;
    rep.upper_bound = ub;
    return rep;
}

std::pair<double, double> peak_time_bounds(const GaussianRate& g, const ServiceModel& s, double t_star)
{
    const ExcessLaw law(s);
    const GaussianRate gv = make_gaussian_rate(g.lambda_star, g.tau, g.sigma);
    const double e_phi =
        law.expectation([&](double u) { return normal::pdf((t_star - gv.tau - u) / gv.sigma); },
                        load_hints(ArrivalModel{gv}, t_star));
    const double upper = g.tau + second_moment(s) / (std::sqrt(8.0 * M_PI) * mean(s) * e_phi);
    return {g.tau, upper};
}

std::pair<double, double> peak_time_bounds(const GaussianRate& g, const ServiceModel& s)
{
    return peak_time_bounds(g, s, peak_time(ArrivalModel{g}, s).t_star);
}

PsiValue psi(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("psi: x must be > 0");
    double lo = -x - 10.0;
    double hi = 10.0 / x;
    // r(y) = phi(y)/Phi(y) is decreasing, so r(y) - x is + at lo and - at hi
    double y = x > normal::inverse_mills(0.0) ? -x + 1.0 / x : 0.0;
    y = std::clamp(y, lo, hi);
    const double target = 1e-13 * std::max(1.0, x);
    for (int i = 0; i < 200; ++i) {
        const double r = normal::inverse_mills(y);
        const double f = r - x;
        if (std::abs(f) <= target) break;
        if (f > 0.0) lo = y;
        else hi = y;
        const double dr = -r * normal::inverse_mills_plus(y);
        double next = dr < 0.0 ? y - f / dr : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == y) break;
        y = next;
    }
    return {x, y};
}

double exact_lag_gauss_exp(const GaussianRate& g, double mu)
{
    if (!(mu > 0.0) || !(g.sigma > 0.0)) throw std::invalid_argument("lag: mu and sigma must be > 0");
    const double x = mu * g.sigma;
    return g.sigma * (x + psi(x).psi_x);
}

std::pair<double, double> lag_bounds_exp(double mu, double sigma)
{
    if (!(mu > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("lag bounds: mu and sigma must be > 0");
    return {1.0 / mu - 1.0 / (mu * mu * mu * sigma * sigma + mu), 1.0 / mu};
}

double lag_det(double delta)
{
    if (!(delta > 0.0)) throw std::invalid_argument("lag: delta must be > 0");
    return 0.5 * delta;
}

SteinExpectations stein_expectations(double mu, double sigma, double ell)
{
    if (!(mu > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("stein: mu and sigma must be > 0");
    const double ms = mu * sigma;
    const double z = ell / sigma - ms;
    const double log_w = std::log(ms) - mu * ell + 0.5 * ms * ms + normal::log_cdf(z);
    SteinExpectations e;
    e.weight = std::exp(log_w);
    e.moment = e.weight * sigma * normal::inverse_mills_plus(z);
    return e;
}

double lag_hyperexp(const GaussianRate& g, const HyperExponential& branches)
{
    validate(ServiceModel{branches});
    if (!(g.sigma > 0.0)) throw std::invalid_argument("lag: sigma must be > 0");
    const std::vector<double> w = excess_mixture_weights(branches);
    double hi = 0.0;
    for (const Branch& b : branches.branches) hi = std::max(hi, 1.0 / b.mu);
    auto f = [&](double ell) {
        double sum = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double mu = branches.branches[j].mu;
            const SteinExpectations e = stein_expectations(mu, g.sigma, ell);
            sum += w[j] * (ell * e.weight - e.moment);
        }
        return sum;
    };
    const RootResult r = brent_root(f, 0.0, hi, 1e-14 * std::max(1.0, hi));
    if (!r.converged) throw NumericError(fmt("lag: hyper-exponential root did not converge at %.12g (residual %g)", r.x, r.fx), std::abs(r.fx));
    return r.x;
}

}  // namespace mtginf
