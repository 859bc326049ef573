#include "mtginf/empirics.hpp"
#include "mtginf/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace mtginf;

namespace {

DailySeries sample(const ArrivalModel& m, int first, int n)
{
    DailySeries s;
    for (int d = first; d < first + n; ++d) {
        s.days.push_back(d);
        s.counts.push_back(rate_at(m, d + 0.5));
    }
    return s;
}

// multiplicative noise, fixed stream
DailySeries noisy(DailySeries s, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.05);
    for (double& c : s.counts) c *= std::exp(n(rng));
    return s;
}

std::string write_temp(const std::string& name, const std::string& body)
{
    const auto path = std::filesystem::temp_directory_path() / ("mtginf_test_" + name);
    std::ofstream(path) << body;
    return path.string();
}

}  // namespace

TEST_CASE("gaussian fit recovers noiseless parameters")
{
    const FitResult f = fit(sample(make_gaussian_rate(1000, 30, 5), 0, 60), Family::gaussian);
    const auto& g = std::get<GaussianRate>(f.model);
    CHECK(g.lambda_star == doctest::Approx(1000).epsilon(0.01));
    CHECK(g.tau == doctest::Approx(30).epsilon(0.01));
    CHECK(g.sigma == doctest::Approx(5).epsilon(0.01));
    CHECK(f.sse >= 0.0);
    CHECK(f.sse < 1e-6);
    CHECK(f.converged);
}

TEST_CASE("gamma fit recovers noiseless parameters")
{
    const FitResult f = fit(sample(make_gamma_rate(1000, 9.4, 0.2), 0, 150), Family::gamma);
    const auto& g = std::get<GammaRate>(f.model);
    CHECK(g.lambda_star == doctest::Approx(1000).epsilon(0.02));
    CHECK(g.alpha == doctest::Approx(9.4).epsilon(0.02));
    CHECK(g.beta == doctest::Approx(0.2).epsilon(0.02));
    CHECK(f.sse < 1e-6);
}

TEST_CASE("fit input checks")
{
    DailySeries zeros = sample(make_gaussian_rate(1000, 30, 5), 0, 20);
    std::fill(zeros.counts.begin(), zeros.counts.end(), 0.0);
    CHECK_THROWS_AS(fit(zeros, Family::gaussian), std::invalid_argument);
    CHECK_THROWS_AS(fit(sample(make_gaussian_rate(1000, 30, 5), 28, 4), Family::gaussian), std::invalid_argument);
    DailySeries bad = sample(make_gaussian_rate(1000, 30, 5), 0, 20);
    bad.days[3] = bad.days[2];
    CHECK_THROWS_AS(fit(bad, Family::gaussian), std::invalid_argument);
    bad = sample(make_gaussian_rate(1000, 30, 5), 0, 20);
    bad.counts[1] = -1.0;
    CHECK_THROWS_AS(fit(bad, Family::gaussian), std::invalid_argument);
}

TEST_CASE("fit is shift and scale equivariant")
{
    const DailySeries base = noisy(sample(make_gaussian_rate(1000, 30, 5), 0, 60), 4);
    const auto g0 = std::get<GaussianRate>(fit(base, Family::gaussian).model);
    for (int k : {-13, 7, 40}) {
        DailySeries shifted = base;
        for (auto& d : shifted.days) d += k;
        const auto g1 = std::get<GaussianRate>(fit(shifted, Family::gaussian).model);
        CHECK(std::abs(g1.tau - (g0.tau + k)) < 1e-3);
        CHECK(g1.sigma == doctest::Approx(g0.sigma).epsilon(1e-3));
    }
    for (double c : {0.01, 3.0, 250.0}) {
        DailySeries scaled = base;
        for (auto& v : scaled.counts) v *= c;
        const auto g1 = std::get<GaussianRate>(fit(scaled, Family::gaussian).model);
        CHECK(g1.lambda_star == doctest::Approx(c * g0.lambda_star).epsilon(1e-3));
    }
    const DailySeries gbase = noisy(sample(make_gamma_rate(1000, 9.4, 0.2), 0, 150), 5);
    const auto a0 = std::get<GammaRate>(fit(gbase, Family::gamma).model);
    DailySeries gscaled = gbase;
    for (auto& v : gscaled.counts) v *= 7.0;
    const auto a1 = std::get<GammaRate>(fit(gscaled, Family::gamma).model);
    CHECK(a1.lambda_star == doctest::Approx(7.0 * a0.lambda_star).epsilon(1e-3));
}

TEST_CASE("lag table")
{
    const DailySeries arrivals = noisy(sample(make_gaussian_rate(1000, 30, 5), 0, 60), 8);
    DailySeries deaths = arrivals;
    for (auto& d : deaths.days) d += 5;
    const LagTable t = cdf_lag_table(arrivals, deaths);
    CHECK(t.quantiles == default_quantiles());
    REQUIRE(t.lags.size() == 9);
    for (auto lag : t.lags) CHECK(lag == 5);

    for (auto lag : cdf_lag_table(arrivals, arrivals).lags) CHECK(lag == 0);

    // same shift expressed through the origin instead of the day offsets
    DailySeries later = arrivals;
    later.origin = 5;
    for (auto lag : cdf_lag_table(arrivals, later).lags) CHECK(lag == 5);

    DailySeries scaled = deaths;
    for (auto& v : scaled.counts) v *= 0.037;
    DailySeries other = noisy(sample(make_gamma_rate(500, 6, 0.3), 3, 50), 2);
    const LagTable plain = cdf_lag_table(arrivals, other);
    DailySeries other_scaled = other;
    for (auto& v : other_scaled.counts) v *= 1234.5;
    CHECK(cdf_lag_table(arrivals, other_scaled).lags == plain.lags);
    CHECK(cdf_lag_table(arrivals, scaled).lags == t.lags);

    CHECK(cdf_lag_table(arrivals, deaths, {0.5}).lags == std::vector<std::int64_t>{5});
    CHECK_THROWS_AS(cdf_lag_table(arrivals, deaths, {0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(cdf_lag_table(arrivals, deaths, {1.0}), std::invalid_argument);
}

TEST_CASE("normalize by peak")
{
    DailySeries s;
    s.days = {0, 1, 2, 3};
    s.counts = {100.0, 35098.0, 2000.0, 0.0};
    const DailySeries n = normalize_peak(s);
    CHECK(n.counts[1] == 1.0);
    CHECK(*std::max_element(n.counts.begin(), n.counts.end()) == 1.0);
    s.counts = {4.0, 4.0, 4.0, 4.0};
    for (double c : normalize_peak(s).counts) CHECK(c == 1.0);
    s.counts = {0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(normalize_peak(s), std::invalid_argument);
}

TEST_CASE("series csv")
{
    std::vector<std::string> warnings;
    const std::string iso = write_temp("iso.csv", "date,count\n2020-02-28,5\n2020-02-29,7\n2020-03-01,-2\n2020-03-03,4\n");
    const DailySeries s = read_series_csv(iso, "korea", &warnings);
    CHECK(s.label == "korea");
    CHECK(s.days == std::vector<std::int64_t>{0, 1, 2, 4});
    CHECK(s.counts == std::vector<double>{5, 7, 0, 4});
    CHECK(warnings.size() == 1);

    const std::string later = write_temp("iso_later.csv", "2020-03-02,1\n2020-03-03,2\n");
    const DailySeries l = read_series_csv(later);
    CHECK(l.origin - s.origin == 3);
    CHECK(l.days == std::vector<std::int64_t>{0, 1});

    const std::string ints = write_temp("ints.csv", "day,count\n10,1\n11,2.5\n13,0\n");
    const DailySeries i = read_series_csv(ints);
    CHECK(i.origin == 10);
    CHECK(i.days == std::vector<std::int64_t>{0, 1, 3});

    CHECK_THROWS_AS(read_series_csv(write_temp("bad.csv", "date,count\n2020-01-01,1\n2020-01-02,x\n")), IoError);
    CHECK_THROWS_AS(read_series_csv(write_temp("order.csv", "1,1\n1,2\n")), IoError);
    CHECK_THROWS_AS(read_series_csv(write_temp("date.csv", "date,count\n2020-02-30,1\n2020-03-01,1\n")), IoError);
    CHECK_THROWS_AS(read_series_csv(write_temp("empty.csv", "date,count\n")), IoError);
    CHECK_THROWS_AS(read_series_csv("/nonexistent/series.csv"), IoError);
}
