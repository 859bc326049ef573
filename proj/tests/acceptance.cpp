// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "mtginf/cli.hpp"
#include "mtginf/empirics.hpp"
#include "mtginf/flatten.hpp"
#include "mtginf/mc_sim.hpp"
#include "mtginf/offered_load.hpp"
#include "mtginf/peak_analysis.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mtginf;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) row.push_back(f);
        rows.push_back(row);
    }
    return rows;
}

// columns of `tables`: 7 peak_time, 8 peak_value
struct TablesRun {
    std::vector<std::vector<std::string>> rows;
    double seconds = 0.0;
    int code = 0;
};

TablesRun run_tables()
{
    std::ostringstream out;
    std::ostringstream err;
    const auto t0 = Clock::now();
    TablesRun r;
    r.code = run({"tables"}, out, err);
    r.seconds = seconds_since(t0);
    r.rows = csv_rows(out.str());
    return r;
}

Outcome criterion1(const TablesRun& t)
{
    Outcome o;
    o.require(t.code == 0 && t.rows.size() == 21, "tables did not produce 20 rows");
    if (!o.ok) return o;
    const double times[] = {10.86, 20.95, 11.40, 21.71, 12.93, 24.51};
    const double values[] = {18.20, 9.70, 31.29, 18.20, 68.28, 52.90};
    double worst = 0.0;
    int k = 0;
    for (std::size_t i = 1; i <= 12; ++i) {
        if (t.rows[i][1].find("queue") == std::string::npos) continue;
        const double dt = std::abs(std::stod(t.rows[i][7]) - times[k]);
        const double dv = std::abs(std::stod(t.rows[i][8]) - values[k]);
        worst = std::max({worst, dt, dv});
        o.require(dt <= 0.02 && dv <= 0.02, "queue peak off at row " + std::to_string(i));
        ++k;
    }
    const double a1 = std::abs(std::stod(t.rows[1][8]) - 19.95);
    const double a2 = std::abs(std::stod(t.rows[2][8]) - 9.97);
    o.require(a1 <= 0.01 && a2 <= 0.01, "arrival peak off");
    o.require(t.seconds < 1.0, "too slow");
    o.detail = o.ok ? fmt("max abs error %.4f, %.3f s", worst, t.seconds) : o.detail;
    return o;
}

Outcome criterion2(const TablesRun& t)
{
    Outcome o;
    o.require(t.code == 0 && t.rows.size() == 21, "tables did not produce 20 rows");
    if (!o.ok) return o;
    const std::size_t idx[] = {13, 14, 15, 16, 19, 20};
    const double times[] = {8.00, 18.00, 9.06, 19.03, 13.60, 24.39};
    const double values[] = {9.77, 6.59, 9.46, 6.50, 49.59, 41.54};
    double worst = 0.0;
    for (int k = 0; k < 6; ++k) {
        const auto& row = t.rows[idx[k]];
        const double dt = std::abs(std::stod(row[7]) - times[k]);
        const double dv = std::abs(std::stod(row[8]) - values[k]);
        worst = std::max({worst, dt, dv});
        o.require(row[2] == "gamma" && dt <= 0.02 && dv <= 0.02, "gamma peak off at row " + std::to_string(idx[k]));
    }
    o.require(t.seconds < 2.0, "too slow");
    o.detail = o.ok ? fmt("max abs error %.4f, %.3f s", worst, t.seconds) : o.detail;
    return o;
}

Outcome criterion3()
{
    Outcome o;
    struct Pair {
        ArrivalModel base, flat;
        double es;
        long queue;
    };
    const Pair pairs[] = {
        {make_gaussian_rate(100, 10, 2), make_gaussian_rate(100, 20, 4), 1, 47},
        {make_gaussian_rate(100, 10, 2), make_gaussian_rate(100, 20, 4), 2, 42},
        {make_gaussian_rate(100, 10, 2), make_gaussian_rate(100, 20, 4), 10, 23},
        {make_gamma_rate(100, 5, 0.5), make_gamma_rate(100, 10, 0.5), 1, 31},
        {make_gamma_rate(100, 5, 0.5), make_gamma_rate(100, 10, 0.5), 10, 16},
    };
    std::string got;
    for (const Pair& p : pairs) {
        const ServiceModel s = make_exponential(1.0 / p.es);
        const ReductionReport r = reduction_report(peak_time(p.base, s), peak_time(p.flat, s));
        got += (got.empty() ? "" : ",") + std::to_string(r.queue_percent);
        o.require(r.queue_percent == p.queue, "queue reduction mismatch");
    }
    o.detail = "queue reductions % " + got;
    return o;
}

Outcome criterion4()
{
    Outcome o;
    std::mt19937_64 rng(20200401);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double ms = std::exp(std::log(0.05) + (std::log(20.0) - std::log(0.05)) * u(rng));
        const double sigma = std::exp(std::log(0.5) + std::log(20.0) * u(rng));
        const double mu = ms / sigma;
        const GaussianRate g = make_gaussian_rate(100, 10, sigma);
        const double lag = exact_lag_gauss_exp(g, mu);
        const double numeric = argmax_load(g, make_exponential(mu), 10.0, 10.0 + 2.0 / mu + sigma) - 10.0;
        worst = std::max(worst, std::abs(lag - numeric));
        const auto [lo, hi] = lag_bounds_exp(mu, sigma);
        o.require(std::abs(lag - numeric) < 1e-6, fmt("lag mismatch at mu=%g sigma=%g", mu, sigma));
        o.require(lo <= lag && lag <= hi, fmt("lag outside bounds at mu=%g sigma=%g", mu, sigma));
    }
    const double secs = seconds_since(t0);
    o.require(secs < 5.0, "too slow");
    if (o.ok) o.detail = fmt("max |exact - argmax| %.2e, %.3f s", worst, secs);
    return o;
}

Outcome criterion5()
{
    Outcome o;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto t0 = Clock::now();
    double worst[4] = {0, 0, 0, 0};
    for (int k = 0; k < 200; ++k) {
        const GaussianRate g = make_gaussian_rate(10 + 490 * u(rng), 50 * u(rng) - 10, 0.3 + 8 * u(rng));
        const double t = g.tau + g.sigma * (10 * u(rng) - 4);
        const double mu = std::exp(3 * u(rng) - 2);
        const double delta = 0.1 + 15 * u(rng);
        const Discrete d = make_discrete({{0.2, delta}, {0.5, 0.5 * delta}, {0.3, 2.0 * delta}});
        const HyperExponential h = make_hyperexponential({{0.6, mu}, {0.4, std::exp(3 * u(rng) - 2)}});
        const double diff[4] = {
            std::abs(load_gauss_exp(g, mu, t) - mean_load(g, make_exponential(mu), t)),
            std::abs(load_gauss_det(g, delta, t) - mean_load(g, make_deterministic(delta), t)),
            std::abs(load_gauss_discrete(g, d, t) - mean_load(g, d, t)),
            std::abs(load_gauss_hyperexp(g, h, t) - mean_load(g, h, t)),
        };
        for (int i = 0; i < 4; ++i) worst[i] = std::max(worst[i], diff[i]);
    }
    const double secs = seconds_since(t0);
    for (double w : worst) o.require(w < 1e-8, fmt("closed form differs by %.3e", w));
    o.require(secs < 10.0, "too slow");
    if (o.ok) {
        o.detail = fmt("max diff exp %.1e det %.1e disc ", worst[0], worst[1]) +
                   fmt("%.1e hyper %.1e, ", worst[2], worst[3]) + fmt("%.3f s", secs);
    }
    return o;
}

Outcome criterion6()
{
    Outcome o;
    SimConfig c;
    c.arrival = make_gaussian_rate(100, 10, 2);
    c.service = make_exponential(1.0);
    c.t0 = -8.0;
    c.t1 = 28.0;
    c.grid = {10.86};
    c.replications = 100000;
    c.seed = 42;
    const auto t0 = Clock::now();
    const SimResult r = simulate(c);
    const double secs = seconds_since(t0);
    const double m = r.mean[0];
    const double se = std::sqrt(r.variance[0] / 1e5);
    const double dispersion = r.variance[0] / m;
    const GofResult g = poisson_gof(r.histograms[0], 18.20);
    o.require(std::abs(m - 18.20) <= 3.0 * se, fmt("mean %.5f outside 18.20 +- 3 se (se %.5f)", m, se));
    o.require(dispersion >= 0.97 && dispersion <= 1.03, fmt("dispersion %.4f", dispersion));
    o.require(g.p_value > 0.001, fmt("chi-square p %.3g", g.p_value));
    o.require(secs < 60.0, "too slow");
    if (o.ok) {
        o.detail = fmt("mean %.4f, dispersion %.4f, ", m, dispersion) +
                   fmt("chi2 %.2f on %.0f dof p=%.3f, ", g.statistic, g.dof, g.p_value) + fmt("%.1f s", secs);
    }
    return o;
}

Outcome criterion7()
{
    Outcome o;
    std::mt19937_64 rng(1905);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double mu = std::exp(4.0 * u(rng) - 2.0);
        const double sigma = std::exp(3.0 * u(rng) - 1.0);
        const double ell = 20.0 * u(rng) - 5.0;
        const SteinExpectations got = stein_expectations(mu, sigma, ell);
        const SteinExpectations want = testing::oracle_stein(mu, sigma, ell);
        worst = std::max({worst, std::abs(got.weight - want.weight), std::abs(got.moment - want.moment)});
    }
    o.require(worst < 1e-9, fmt("max diff %.3e", worst));
    if (o.ok) o.detail = fmt("max diff %.2e", worst);
    return o;
}

Outcome criterion8()
{
    Outcome o;
    auto sample = [](const ArrivalModel& m, int n) {
        DailySeries s;
        for (int d = 0; d < n; ++d) {
            s.days.push_back(d);
            s.counts.push_back(rate_at(m, d + 0.5));
        }
        return s;
    };
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const auto g = std::get<GaussianRate>(fit(sample(make_gaussian_rate(1000, 30, 5), 60), Family::gaussian).model);
    const double eg = std::max({rel(g.lambda_star, 1000), rel(g.tau, 30), rel(g.sigma, 5)});
    o.require(eg <= 0.01, fmt("gaussian recovery error %.3e", eg));
    const auto m = std::get<GammaRate>(fit(sample(make_gamma_rate(1000, 9.4, 0.2), 150), Family::gamma).model);
    const double em = std::max({rel(m.lambda_star, 1000), rel(m.alpha, 9.4), rel(m.beta, 0.2)});
    o.require(em <= 0.02, fmt("gamma recovery error %.3e", em));

    DailySeries arrivals = sample(make_gaussian_rate(1000, 30, 5), 60);
    for (std::size_t i = 0; i < arrivals.counts.size(); ++i) arrivals.counts[i] = std::round(arrivals.counts[i]) + i % 4;
    DailySeries deaths = arrivals;
    for (auto& d : deaths.days) d += 5;
    for (auto lag : cdf_lag_table(arrivals, deaths).lags) o.require(lag == 5, "lag table shift not recovered");
    if (o.ok) o.detail = fmt("gaussian rel err %.1e, gamma rel err %.1e, lags all 5", eg, em);
    return o;
}

Outcome criterion9()
{
    Outcome o;
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = -HUGE_VAL;
    for (int k = 0; k < 50; ++k) {
        const double l = 10.0 + 990.0 * u(rng);
        const double es = 0.2 + 10.0 * u(rng);
        const double c = 2.0 + 100.0 * u(rng);
        const std::vector<ServiceModel> services{
            make_exponential(1.0 / es), make_deterministic(es),
            make_discrete({{0.3, 0.5 * es}, {0.7, 0.85 * es / 0.7}}),
            make_hyperexponential({{0.5, 2.0 / (0.5 * es)}, {0.5, 2.0 / (1.5 * es)}}),
            testing::tabulated_exponential(1.0 / es, es / 10.0, 30.0 * es)};
        for (const ServiceModel& s : services) {
            const double m = mean(s);
            const FlattenSolution f = sigma_star(l, m, c);
            const GaussianRate a = make_gaussian_rate(l, 0.0, f.sigma_star);
            const double q = max_load_on_grid(a, s, -8.0 * f.sigma_star, 8.0 * f.sigma_star + 8.0 * m, 2001);
            worst = std::max(worst, q - c);
            o.require(q <= c + 1e-9, fmt("max load %.12g exceeds C = %.12g", q, c));
        }
    }
    if (o.ok) o.detail = fmt("max(q - C) = %.3e over 250 cases", worst);
    return o;
}

}  // namespace

int main()
{
    const TablesRun tables = run_tables();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 gaussian table reproduction", [&] { return criterion1(tables); }},
        {"2 gamma table reproduction", [&] { return criterion2(tables); }},
        {"3 flattening percentages", criterion3},
        {"4 exact lag vs numeric argmax", criterion4},
        {"5 closed forms vs quadrature", criterion5},
        {"6 monte-carlo poisson marginal", criterion6},
        {"7 stein expectations vs quadrature", criterion7},
        {"8 fit recovery and lag shift", criterion8},
        {"9 capacity bound on a grid", criterion9},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r.ok = false;
            r.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %s: %s\n", r.ok ? "PASS" : "FAIL", name.c_str(), r.detail.c_str());
        std::fflush(stdout);
        failed += r.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
