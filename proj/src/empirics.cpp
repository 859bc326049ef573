#include "mtginf/empirics.hpp"

#include "mtginf/detail/csv.hpp"
#include "mtginf/errors.hpp"
#include "mtginf/minimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>

namespace mtginf {

namespace {

constexpr double jitter[3] = {0.7, 1.0, 1.3};

struct Problem {
    std::vector<double> t;  // day midpoints
    std::vector<double> y;
    double scale = 1.0;  // 1 / max count, keeps the objective O(1)
};

double sse(const Problem& p, const ArrivalModel& m)
{
    double s = 0.0;
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        const double r = (p.y[i] - rate_at(m, p.t[i])) * p.scale;
        s += r * r;
    }
    return s;
}

// Unconstrained coordinates:
//   gaussian (log lambda*, tau, log sigma)
//   gamma    (log lambda*, log(alpha - 1), log beta)
ArrivalModel decode(Family f, std::span<const double> x)
{
    if (f == Family::gaussian) return GaussianRate{std::exp(x[0]), x[1], std::exp(x[2])};
    return GammaRate{std::exp(x[0]), 1.0 + std::exp(x[1]), std::exp(x[2])};
}

std::vector<std::vector<double>> starts(const Problem& p, Family f)
{
    double total = 0.0;
    double m1 = 0.0;
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        total += p.y[i];
        m1 += p.y[i] * p.t[i];
    }
    m1 /= total;
    double var = 0.0;
    for (std::size_t i = 0; i < p.t.size(); ++i) var += p.y[i] * (p.t[i] - m1) * (p.t[i] - m1);
    var = std::max(var / total, 0.25);
    const auto peak = std::max_element(p.y.begin(), p.y.end()) - p.y.begin();
    const double t_peak = p.t[static_cast<std::size_t>(peak)];

    std::vector<std::vector<double>> out;
    for (double a : jitter) {
        for (double b : jitter) {
            if (f == Family::gaussian) {
                out.push_back({std::log(total * a), t_peak, std::log(std::sqrt(var) * b)});
            } else {
                // method of moments on the day distribution, shape kept above 1
                const double alpha = std::max(m1 * m1 / var, 1.05);
                const double beta = std::max(m1, 1e-3) / var;
                out.push_back({std::log(total * a), std::log((alpha - 1.0) * b), std::log(beta * b)});
            }
        }
    }
    return out;
}

std::int64_t days_from_civil(int y, unsigned m, unsigned d)
{
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) return INT64_MIN;
    return sys_days{ymd}.time_since_epoch().count();
}

std::optional<std::int64_t> parse_day(const std::string& s)
{
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) == 3) {
        const std::int64_t n = days_from_civil(y, m, d);
        if (n == INT64_MIN) return std::nullopt;
        return n;
    }
    const auto v = detail::parse_double(s);
    if (!v || *v != std::floor(*v)) return std::nullopt;
    return static_cast<std::int64_t>(*v);
}

std::int64_t first_crossing(const DailySeries& s, double q)
{
    const double total = std::accumulate(s.counts.begin(), s.counts.end(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.counts.size(); ++i) {
        acc += s.counts[i];
        // relative slack absorbs rounding in the running sum
        if (acc / total >= q * (1.0 - 1e-12)) return s.origin + s.days[i];
    }
    return s.origin + s.days.back();
}

}  // namespace

void validate(const DailySeries& s)
{
    if (s.days.empty()) throw std::invalid_argument("series: empty");
    if (s.days.size() != s.counts.size()) throw std::invalid_argument("series: days and counts differ in length");
    for (std::size_t i = 1; i < s.days.size(); ++i)
        if (s.days[i] <= s.days[i - 1]) throw std::invalid_argument("series: days must be strictly increasing");
    for (double c : s.counts)
        if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("series: counts must be finite and >= 0");
}

const char* to_string(Family f) { return f == Family::gaussian ? "gaussian" : "gamma"; }

FitResult fit(const DailySeries& series, Family family)
{
    validate(series);
    if (series.days.size() < 5) throw std::invalid_argument("fit: need at least 5 data points");
    const double total = std::accumulate(series.counts.begin(), series.counts.end(), 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("fit: total count must be > 0");

    Problem p;
    for (std::size_t i = 0; i < series.days.size(); ++i) {
        p.t.push_back(static_cast<double>(series.days[i]) + 0.5);
        p.y.push_back(series.counts[i]);
    }
    p.scale = 1.0 / *std::max_element(p.y.begin(), p.y.end());
    if (family == Family::gamma && p.t.front() < 0.0)
        throw std::invalid_argument("fit: gamma family needs nonnegative day indices");

    auto objective = [&](std::span<const double> x) {
        for (double v : x)
            if (!std::isfinite(v) || std::abs(v) > 700.0) return HUGE_VAL;
        return sse(p, decode(family, x));
    };

    NelderMeadOptions opt;
    opt.x_tol = 1e-12;
    opt.initial_step = 0.1;

    FitResult best;
    best.sse = HUGE_VAL;
    int iterations = 0;
    std::vector<double> best_x;
    bool best_converged = false;
    for (const auto& x0 : starts(p, family)) {
        MinimizeResult r = nelder_mead(objective, x0, opt);
        iterations += r.iterations;
        // restart from the optimum: a collapsed simplex can stall early
        MinimizeResult r2 = nelder_mead(objective, r.x, opt);
        iterations += r2.iterations;
        if (r2.fx < best.sse) {
            best.sse = r2.fx;
            best_x = r2.x;
            best_converged = r.converged && r2.converged;
        }
    }
    best.model = decode(family, best_x);
    best.sse = sse(Problem{p.t, p.y, 1.0}, best.model);
    best.iterations = iterations;
    best.converged = best_converged && std::isfinite(best.sse);
    return best;
}

std::vector<double> default_quantiles() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

LagTable cdf_lag_table(const DailySeries& arrivals, const DailySeries& deaths, const std::vector<double>& quantiles)
{
    validate(arrivals);
    validate(deaths);
    auto total = [](const DailySeries& s) { return std::accumulate(s.counts.begin(), s.counts.end(), 0.0); };
    if (!(total(arrivals) > 0.0) || !(total(deaths) > 0.0))
        throw std::invalid_argument("lag table: both series need a positive total");
    for (std::size_t i = 0; i < quantiles.size(); ++i) {
        if (!(quantiles[i] > 0.0 && quantiles[i] < 1.0)) throw std::invalid_argument("lag table: quantiles must be in (0, 1)");
        if (i > 0 && !(quantiles[i] > quantiles[i - 1]))
            throw std::invalid_argument("lag table: quantiles must be strictly increasing");
    }
    LagTable t;
    t.quantiles = quantiles;
    for (double q : quantiles) t.lags.push_back(first_crossing(deaths, q) - first_crossing(arrivals, q));
    return t;
}

DailySeries normalize_peak(const DailySeries& s)
{
    validate(s);
    const double m = *std::max_element(s.counts.begin(), s.counts.end());
    if (!(m > 0.0)) throw std::invalid_argument("normalize: maximum count is 0");
    DailySeries out = s;
    for (double& c : out.counts) c /= m;
    return out;
}

DailySeries read_series_csv(const std::string& path, const std::string& label, std::vector<std::string>* warnings)
{
    const auto rows = detail::read_csv_file(path);
    DailySeries s;
    s.label = label.empty() ? path : label;
    std::vector<std::int64_t> absolute;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() < 2) throw IoError(path + ": row " + std::to_string(i + 1) + " needs date,count");
        const auto day = parse_day(row[0]);
        const auto count = detail::parse_double(row[1]);
        if (i == 0 && (!day || !count)) continue;  // header
        if (!day || !count) throw IoError(path + ": cannot parse row " + std::to_string(i + 1));
        double c = *count;
        if (c < 0.0) {
            if (warnings) warnings->push_back(path + ": negative count on row " + std::to_string(i + 1) + " clamped to 0");
            c = 0.0;
        }
        absolute.push_back(*day);
        s.counts.push_back(c);
    }
    if (absolute.empty()) throw IoError(path + ": no data rows");
    s.origin = absolute.front();
    for (std::int64_t d : absolute) s.days.push_back(d - s.origin);
    for (std::size_t i = 1; i < s.days.size(); ++i)
        if (s.days[i] <= s.days[i - 1]) throw IoError(path + ": dates must be strictly increasing");
    return s;
}

}  // namespace mtginf
