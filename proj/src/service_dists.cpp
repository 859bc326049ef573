#include "mtginf/service_dists.hpp"

#include "mtginf/detail/csv.hpp"
#include "mtginf/detail/overloaded.hpp"
#include "mtginf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mtginf {

using detail::overloaded;

namespace {

constexpr double weight_tol = 1e-12;
// Exponential weights are cut where e^{-mu u} < 1e-26.
constexpr double exp_truncation = 60.0;

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

QuadratureOptions engine_options() { return {1e-12, 1e-12, 4000}; }

void require_converged(const QuadratureResult& r, const char* where)
{
    if (!r.converged) {
        std::ostringstream msg;
        msg << where << ": quadrature did not converge (achieved error " << r.error << ")";
        throw NumericError(msg.str(), r.error);
    }
}

double exponential_expectation(double mu, const std::function<double(double)>& f, const IntegrandHints& hints)
{
    const double scale = 1.0 / mu;
    std::vector<double> cuts = hints.breakpoints;
    for (double k : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0}) cuts.push_back(k * scale);
    const auto r = integrate_gk([&](double u) { return f(u) * mu * std::exp(-mu * u); }, 0.0, exp_truncation * scale,
                                cuts, engine_options());
    require_converged(r, "excess_expectation");
    return r.value;
}

double plain_integral(const std::function<double(double)>& f, double a, double b, const IntegrandHints& hints)
{
    const auto r = integrate_gk(f, a, b, hints.breakpoints, engine_options());
    require_converged(r, "excess_expectation");
    return r.value;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tabulated

Tabulated::Tabulated(std::vector<double> grid, std::vector<double> survival)
    : grid_(std::move(grid))
    , survival_(std::move(survival))
{
    if (grid_.size() < 2 || grid_.size() != survival_.size()) {
        throw std::invalid_argument("tabulated survival: need >= 2 points and matching column lengths");
    }
    if (grid_.front() != 0.0) throw std::invalid_argument("tabulated survival: grid must start at 0");
    if (survival_.front() != 1.0) throw std::invalid_argument("tabulated survival: survival(0) must be 1");
    if (survival_.back() != 0.0) throw std::invalid_argument("tabulated survival: last survival value must be 0");
    for (std::size_t k = 1; k < grid_.size(); ++k) {
        if (!(grid_[k] > grid_[k - 1]) || !std::isfinite(grid_[k])) {
            throw std::invalid_argument("tabulated survival: grid must be strictly increasing");
        }
        if (!(survival_[k] <= survival_[k - 1]) || survival_[k] < 0.0) {
            throw std::invalid_argument("tabulated survival: survival must be nonincreasing in [0, 1]");
        }
    }
    cumulative_.assign(grid_.size(), 0.0);
    double second = 0.0;
    for (std::size_t k = 1; k < grid_.size(); ++k) {
        const double a = grid_[k - 1];
        const double b = grid_[k];
        const double h = b - a;
        const double ga = survival_[k - 1];
        const double gb = survival_[k];
        cumulative_[k] = cumulative_[k - 1] + 0.5 * h * (ga + gb);
        // Simpson is exact for t * (linear survival)
        const double m = 0.5 * (a + b);
        second += h / 6.0 * (a * ga + 4.0 * m * 0.5 * (ga + gb) + b * gb);
    }
    mean_ = cumulative_.back();
    second_moment_ = 2.0 * second;
    if (!(mean_ > 0.0)) throw std::invalid_argument("tabulated survival: mean must be > 0");
}

double Tabulated::survival_at(double t) const
{
    if (t <= 0.0) return 1.0;
    if (t >= grid_.back()) return 0.0;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin());
    const double a = grid_[k - 1];
    const double b = grid_[k];
    const double w = (t - a) / (b - a);
    return survival_[k - 1] + w * (survival_[k] - survival_[k - 1]);
}

double Tabulated::integrated_survival(double t) const
{
    if (t <= 0.0) return 0.0;
    if (t >= grid_.back()) return mean_;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin());
    const double a = grid_[k - 1];
    return cumulative_[k - 1] + 0.5 * (t - a) * (survival_[k - 1] + survival_at(t));
}

Tabulated load_tabulated_csv(const std::string& path)
{
    const auto rows = detail::read_csv_file(path);
    std::vector<double> grid;
    std::vector<double> surv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() < 2) throw IoError(path + ": expected two columns t,survival");
        const auto t = detail::parse_double(row[0]);
        const auto g = detail::parse_double(row[1]);
        if (!t || !g) {
            if (i == 0) continue;  // header
            throw IoError(path + ": non-numeric value on row " + std::to_string(i + 1));
        }
        grid.push_back(*t);
        surv.push_back(*g);
    }
    return Tabulated(std::move(grid), std::move(surv));
}

// ---------------------------------------------------------------------------
// Construction and validation

Exponential make_exponential(double mu)
{
    Exponential e{mu};
    validate(e);
    return e;
}

Deterministic make_deterministic(double delta)
{
    Deterministic d{delta};
    validate(d);
    return d;
}

Discrete make_discrete(std::vector<Atom> atoms)
{
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.delta < b.delta; });
    std::vector<Atom> merged;
    for (const Atom& a : atoms) {
        if (!merged.empty() && merged.back().delta == a.delta)
            merged.back().p += a.p;
        else
            merged.push_back(a);
    }
    Discrete d{std::move(merged)};
    validate(d);
    return d;
}

HyperExponential make_hyperexponential(std::vector<Branch> branches)
{
    HyperExponential h{std::move(branches)};
    validate(h);
    return h;
}

void validate(const ServiceModel& s)
{
    std::visit(overloaded{
                   [](const Exponential& e) {
                       if (!positive(e.mu)) throw std::invalid_argument("exponential service: mu must be > 0");
                   },
                   [](const Deterministic& d) {
                       if (!positive(d.delta)) throw std::invalid_argument("deterministic service: delta must be > 0");
                   },
                   [](const Discrete& d) {
                       if (d.atoms.empty()) throw std::invalid_argument("discrete service: no atoms");
                       double total = 0.0;
                       for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                           const Atom& a = d.atoms[i];
                           if (!(a.p >= 0.0) || !positive(a.delta))
                               throw std::invalid_argument("discrete service: need p >= 0 and delta > 0");
                           if (i > 0 && !(a.delta > d.atoms[i - 1].delta))
                               throw std::invalid_argument("discrete service: durations must be distinct and sorted");
                           total += a.p;
                       }
                       if (std::abs(total - 1.0) > weight_tol)
                           throw std::invalid_argument("discrete service: probabilities must sum to 1");
                   },
                   [](const HyperExponential& h) {
                       if (h.branches.empty()) throw std::invalid_argument("hyper-exponential service: no branches");
                       double total = 0.0;
                       for (const Branch& b : h.branches) {
                           if (!(b.p >= 0.0) || !positive(b.mu))
                               throw std::invalid_argument("hyper-exponential service: need p >= 0 and mu > 0");
                           total += b.p;
                       }
                       if (std::abs(total - 1.0) > weight_tol)
                           throw std::invalid_argument("hyper-exponential service: probabilities must sum to 1");
                   },
                   [](const Tabulated&) {},  // validated on construction
               },
               s);
}

// ---------------------------------------------------------------------------
// Moments

double mean(const ServiceModel& s)
{
    return std::visit(overloaded{
                          [](const Exponential& e) { return 1.0 / e.mu; },
                          [](const Deterministic& d) { return d.delta; },
                          [](const Discrete& d) {
                              double m = 0.0;
                              for (const Atom& a : d.atoms) m += a.p * a.delta;
                              return m;
                          },
                          [](const HyperExponential& h) {
                              double m = 0.0;
                              for (const Branch& b : h.branches) m += b.p / b.mu;
                              return m;
                          },
                          [](const Tabulated& t) { return t.mean(); },
                      },
                      s);
}

double second_moment(const ServiceModel& s)
{
    return std::visit(overloaded{
                          [](const Exponential& e) { return 2.0 / (e.mu * e.mu); },
                          [](const Deterministic& d) { return d.delta * d.delta; },
                          [](const Discrete& d) {
                              double m = 0.0;
                              for (const Atom& a : d.atoms) m += a.p * a.delta * a.delta;
                              return m;
                          },
                          [](const HyperExponential& h) {
                              double m = 0.0;
                              for (const Branch& b : h.branches) m += 2.0 * b.p / (b.mu * b.mu);
                              return m;
                          },
                          [](const Tabulated& t) { return t.second_moment(); },
                      },
                      s);
}

double survival(const ServiceModel& s, double t)
{
    if (t < 0.0) return 1.0;
    return std::visit(overloaded{
                          [t](const Exponential& e) { return std::exp(-e.mu * t); },
                          [t](const Deterministic& d) { return t < d.delta ? 1.0 : 0.0; },
                          [t](const Discrete& d) {
                              double g = 0.0;
                              for (const Atom& a : d.atoms)
                                  if (t < a.delta) g += a.p;
                              return g;
                          },
                          [t](const HyperExponential& h) {
                              double g = 0.0;
                              for (const Branch& b : h.branches) g += b.p * std::exp(-b.mu * t);
                              return g;
                          },
                          [t](const Tabulated& tab) { return tab.survival_at(t); },
                      },
                      s);
}

std::vector<double> excess_mixture_weights(const HyperExponential& h)
{
    std::vector<double> w;
    w.reserve(h.branches.size());
    double total = 0.0;
    for (const Branch& b : h.branches) {
        w.push_back(b.p / b.mu);
        total += w.back();
    }
    for (double& x : w) x /= total;
    return w;
}

// ---------------------------------------------------------------------------
// Stationary excess

ExcessLaw::ExcessLaw(ServiceModel service)
    : service_(std::move(service))
{
    validate(service_);
}

double ExcessLaw::mean() const { return second_moment(service_) / (2.0 * mtginf::mean(service_)); }

double ExcessLaw::density(double t) const
{
    if (t < 0.0) return 0.0;
    return survival(service_, t) / mtginf::mean(service_);
}

double ExcessLaw::cdf(double t) const
{
    if (t <= 0.0) return 0.0;
    return std::visit(overloaded{
                          [t](const Exponential& e) { return -std::expm1(-e.mu * t); },
                          [t](const Deterministic& d) { return std::min(t / d.delta, 1.0); },
                          [&](const Discrete& d) {
                              double acc = 0.0;
                              for (const Atom& a : d.atoms) acc += a.p * std::min(t, a.delta);
                              return acc / mtginf::mean(service_);
                          },
                          [t](const HyperExponential& h) {
                              const auto w = excess_mixture_weights(h);
                              double acc = 0.0;
                              for (std::size_t j = 0; j < w.size(); ++j)
                                  acc += w[j] * -std::expm1(-h.branches[j].mu * t);
                              return acc;
                          },
                          [t](const Tabulated& tab) { return tab.integrated_survival(t) / tab.mean(); },
                      },
                      service_);
}

double ExcessLaw::expectation(const std::function<double(double)>& f, const IntegrandHints& hints) const
{
    return std::visit(
        overloaded{
            // memoryless: S_e has the same exponential law
            [&](const Exponential& e) { return exponential_expectation(e.mu, f, hints); },
            // S_e ~ Uniform(0, delta)
            [&](const Deterministic& d) { return plain_integral(f, 0.0, d.delta, hints) / d.delta; },
            // mixture of Uniform(0, delta_i) with weights p_i delta_i / E[S]; atoms are sorted,
            // so integrate each gap once and weight it by the mass of longer atoms.
            [&](const Discrete& d) {
                const double m = mtginf::mean(service_);
                double tail = 1.0;
                double lo = 0.0;
                double acc = 0.0;
                for (const Atom& a : d.atoms) {
                    if (tail > 0.0) acc += tail * plain_integral(f, lo, a.delta, hints);
                    tail -= a.p;
                    lo = a.delta;
                }
                return acc / m;
            },
            [&](const HyperExponential& h) {
                const auto w = excess_mixture_weights(h);
                double acc = 0.0;
                for (std::size_t j = 0; j < w.size(); ++j) {
                    if (w[j] > 0.0) acc += w[j] * exponential_expectation(h.branches[j].mu, f, hints);
                }
                return acc;
            },
            [&](const Tabulated& tab) {
                std::vector<double> cuts = tab.grid();
                cuts.insert(cuts.end(), hints.breakpoints.begin(), hints.breakpoints.end());
                const auto r = integrate_simpson([&](double u) { return f(u) * tab.survival_at(u); }, 0.0,
                                                 tab.grid().back(), cuts, 1e-9);
                require_converged(r, "excess_expectation");
                return r.value / tab.mean();
            },
        },
        service_);
}

double excess_expectation(const ServiceModel& s, const std::function<double(double)>& f, const IntegrandHints& hints)
{
    return ExcessLaw(s).expectation(f, hints);
}

}  // namespace mtginf
