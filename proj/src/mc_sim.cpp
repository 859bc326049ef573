#include "mtginf/mc_sim.hpp"

#include "mtginf/detail/overloaded.hpp"
#include "mtginf/roots.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <thread>

namespace mtginf {

using detail::overloaded;

namespace {

// (0, 1), never 0 or 1; 53 random bits.
double uniform_open(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

// SplitMix64 finaliser, a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Distinct replications of one run get distinct generator seeds. Much cheaper
// than std::seed_seq, which dominated short replications.
std::uint64_t replication_seed(std::uint64_t seed, std::int64_t r)
{
    return mix64(seed ^ mix64(static_cast<std::uint64_t>(r)));
}

struct Tally {
    std::vector<std::int64_t> sum;
    std::vector<std::int64_t> sum_sq;
    std::vector<std::vector<std::uint64_t>> hist;
    std::uint64_t arrivals = 0;

    explicit Tally(std::size_t n) : sum(n, 0), sum_sq(n, 0), hist(n) {}

    void merge(const Tally& o)
    {
        arrivals += o.arrivals;
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += o.sum[i];
            sum_sq[i] += o.sum_sq[i];
            if (hist[i].size() < o.hist[i].size()) hist[i].resize(o.hist[i].size(), 0);
            for (std::size_t k = 0; k < o.hist[i].size(); ++k) hist[i][k] += o.hist[i][k];
        }
    }
};

void run_replications(const SimConfig& cfg, double lambda_max, std::int64_t first, std::int64_t last, Tally& tally)
{
    const std::size_t n = cfg.grid.size();
    std::vector<std::int64_t> diff(n + 1);
    for (std::int64_t r = first; r < last; ++r) {
        std::mt19937_64 rng(replication_seed(cfg.seed, r));
        std::fill(diff.begin(), diff.end(), 0);
        if (lambda_max > 0.0) {
            double t = cfg.t0;
            for (;;) {
                t -= std::log(uniform_open(rng)) / lambda_max;
                if (t > cfg.t1) break;
                if (uniform_open(rng) * lambda_max > rate_at(cfg.arrival, t)) continue;
                ++tally.arrivals;
                const double leave = t + sample_service(cfg.service, uniform_open(rng));
                // present at grid time g iff t <= g < leave
                const auto lo = std::lower_bound(cfg.grid.begin(), cfg.grid.end(), t) - cfg.grid.begin();
                const auto hi = std::lower_bound(cfg.grid.begin(), cfg.grid.end(), leave) - cfg.grid.begin();
                if (lo < hi) {
                    ++diff[static_cast<std::size_t>(lo)];
                    --diff[static_cast<std::size_t>(hi)];
                }
            }
        }
        std::int64_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            count += diff[i];
            tally.sum[i] += count;
            tally.sum_sq[i] += count * count;
            auto& h = tally.hist[i];
            const auto k = static_cast<std::size_t>(count);
            if (h.size() <= k) h.resize(k + 1, 0);
            ++h[k];
        }
    }
}

double hyperexp_cdf(const HyperExponential& h, double x)
{
    double c = 0.0;
    for (const Branch& b : h.branches) c += b.p * -std::expm1(-b.mu * x);
    return c;
}

}  // namespace

double sample_service(const ServiceModel& s, double u)
{
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("sample_service: u must be in (0, 1)");
    return std::visit(
        overloaded{
            [u](const Exponential& e) { return -std::log1p(-u) / e.mu; },
            [](const Deterministic& d) { return d.delta; },
            [u](const Discrete& d) {
                double c = 0.0;
                for (const Atom& a : d.atoms) {
                    c += a.p;
                    if (u <= c) return a.delta;
                }
                return d.atoms.back().delta;
            },
            [u](const HyperExponential& h) {
                double mu_min = h.branches.front().mu;
                for (const Branch& b : h.branches) mu_min = std::min(mu_min, b.mu);
                // every branch cdf is >= u here
                const double hi = -std::log1p(-u) / mu_min;
                const RootResult r =
                    brent_root([&](double x) { return hyperexp_cdf(h, x) - u; }, 0.0, hi, 1e-15 * std::max(1.0, hi));
                return r.x;
            },
            [u](const Tabulated& tab) {
                const auto& g = tab.grid();
                const auto& sv = tab.survival();
                const double target = 1.0 - u;
                // first node with survival <= target; survival is nonincreasing
                std::size_t k = 1;
                while (k < sv.size() && sv[k] > target) ++k;
                if (k >= sv.size()) return g.back();
                const double s0 = sv[k - 1];
                const double s1 = sv[k];
                if (s0 == s1) return g[k - 1];
                return g[k - 1] + (s0 - target) / (s0 - s1) * (g[k] - g[k - 1]);
            },
        },
        s);
}

SimResult simulate(const SimConfig& cfg)
{
    // lambda* = 0 is allowed here: an empty system is a useful degenerate case
    if (!(total_arrivals(cfg.arrival) >= 0.0)) throw std::invalid_argument("simulate: lambda_star must be >= 0");
    validate(std::visit(
        [](auto m) -> ArrivalModel {
            if (m.lambda_star == 0.0) m.lambda_star = 1.0;
            return m;
        },
        cfg.arrival));
    validate(cfg.service);
    if (!(cfg.t0 < cfg.t1)) throw std::invalid_argument("simulate: need t0 < t1");
    if (cfg.replications < 1) throw std::invalid_argument("simulate: replications must be >= 1");
    if (cfg.grid.empty()) throw std::invalid_argument("simulate: empty grid");
    if (!std::is_sorted(cfg.grid.begin(), cfg.grid.end())) throw std::invalid_argument("simulate: grid must be sorted");
    if (cfg.grid.front() < cfg.t0 || cfg.grid.back() > cfg.t1)
        throw std::invalid_argument("simulate: grid must lie inside [t0, t1]");

    SimResult res;
    res.grid = cfg.grid;
    res.seed = cfg.seed;
    res.replications = cfg.replications;

    const double lambda_star = total_arrivals(cfg.arrival);
    const double lambda_max = peak_rate_bound(cfg.arrival);
    if (lambda_star > 0.0) {
        const double mode = mode_time(cfg.arrival);
        const double width = 8.0 * spread(cfg.arrival);
        const double left = std::max(support_start(cfg.arrival), mode - width);
        if (cfg.t0 > left || cfg.t1 < mode + width) {
            res.warnings.push_back("horizon covers less than 8 spreads of arrival mass around the mode");
        }
        const double tail = expected_arrivals(cfg.arrival, -INFINITY, cfg.t0) +
                            expected_arrivals(cfg.arrival, cfg.t1, INFINITY);
        if (tail > 1e-6 * lambda_star) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "horizon truncates %.6g expected arrivals", tail);
            res.warnings.emplace_back(buf);
        }
    }

    const std::size_t n = cfg.grid.size();
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, cfg.replications));
    std::vector<Tally> tallies(threads, Tally(n));
    const std::int64_t chunk = (cfg.replications + threads - 1) / threads;
    if (threads == 1) {
        run_replications(cfg, lambda_max, 0, cfg.replications, tallies[0]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            const std::int64_t first = w * chunk;
            const std::int64_t last = std::min(cfg.replications, first + chunk);
            pool.emplace_back([&, w, first, last] { run_replications(cfg, lambda_max, first, last, tallies[w]); });
        }
        for (auto& t : pool) t.join();
    }
    Tally total(n);
    for (const Tally& t : tallies) total.merge(t);

    const auto reps = static_cast<long double>(cfg.replications);
    res.mean.resize(n);
    res.variance.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = static_cast<long double>(total.sum[i]);
        const auto ss = static_cast<long double>(total.sum_sq[i]);
        res.mean[i] = static_cast<double>(s / reps);
        res.variance[i] = cfg.replications > 1 ? static_cast<double>(std::max(0.0L, (ss - s * s / reps) / (reps - 1))) : 0.0;
    }
    res.histograms = std::move(total.hist);
    res.arrivals_total = total.arrivals;
    res.arrivals_mean = static_cast<double>(static_cast<long double>(total.arrivals) / reps);
    return res;
}

GofResult poisson_gof(const std::vector<std::uint64_t>& histogram, double mean)
{
    if (!(mean >= 0.0)) throw std::invalid_argument("gof: mean must be >= 0");
    std::uint64_t n_total = 0;
    for (auto c : histogram) n_total += c;
    GofResult g;
    if (n_total == 0 || mean == 0.0) {
        g.p_value = 1.0;
        g.bins = 1;
        return g;
    }
    const double n = static_cast<double>(n_total);
    auto observed = [&](std::size_t k) { return k < histogram.size() ? static_cast<double>(histogram[k]) : 0.0; };
    auto pmf = [&](std::size_t k) {
        const double kd = static_cast<double>(k);
        return std::exp(kd * std::log(mean) - mean - boost::math::lgamma(kd + 1.0));
    };

    std::vector<double> bin_e;
    std::vector<double> bin_o;
    double acc_e = 0.0;
    double acc_o = 0.0;
    for (std::size_t k = 0;; ++k) {
        acc_e += n * pmf(k);
        acc_o += observed(k);
        const double tail_e = n * boost::math::gamma_p(static_cast<double>(k) + 1.0, mean);  // P(K > k)
        if (tail_e < 5.0) {
            for (std::size_t j = k + 1; j < histogram.size(); ++j) acc_o += observed(j);
            acc_e += tail_e;
            if (acc_e < 5.0 && !bin_e.empty()) {
                bin_e.back() += acc_e;
                bin_o.back() += acc_o;
            } else {
                bin_e.push_back(acc_e);
                bin_o.push_back(acc_o);
            }
            break;
        }
        if (acc_e >= 5.0) {
            bin_e.push_back(acc_e);
            bin_o.push_back(acc_o);
            acc_e = 0.0;
            acc_o = 0.0;
        }
    }
    for (std::size_t b = 0; b < bin_e.size(); ++b) g.statistic += (bin_o[b] - bin_e[b]) * (bin_o[b] - bin_e[b]) / bin_e[b];
    g.bins = static_cast<int>(bin_e.size());
    g.dof = g.bins - 1;
    if (g.dof < 1) {
        g.p_value = 1.0;
        return g;
    }
    g.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(g.dof), g.statistic));
    return g;
}

}  // namespace mtginf
