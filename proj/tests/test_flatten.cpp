#include "mtginf/flatten.hpp"
#include "mtginf/offered_load.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mtginf;

TEST_CASE("sigma star")
{
    const double c = 100.0 / (2.0 * std::sqrt(2.0 * M_PI));
    const FlattenSolution f = sigma_star(100, 1, c);
    CHECK(f.sigma_star == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(std::abs(f.implied_bound - c) < 1e-10 * c);
    CHECK(f.capacity == c);

    const FlattenSolution g = sigma_star(100, 10, 50);
    CHECK(g.sigma_star == doctest::Approx(1000.0 / (50.0 * std::sqrt(2.0 * M_PI))).epsilon(1e-15));
    CHECK(g.sigma_star == doctest::Approx(7.979).epsilon(1e-3 / 7.979));
    const GaussianRate a = make_gaussian_rate(100, 10, g.sigma_star);
    CHECK(max_load_on_grid(a, make_exponential(0.1), -20.0, 80.0, 20001) <= 50.0);

    CHECK(sigma_star(100, 1, 1e12).sigma_star < 1e-10);
    CHECK_THROWS_AS(sigma_star(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sigma_star(1, -1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sigma_star(1, 1, 0), std::invalid_argument);
}

TEST_CASE("sigma star is homogeneous in lambda star and capacity")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double l = 10.0 + 500.0 * u(rng);
        const double es = 0.1 + 10.0 * u(rng);
        const double c = 5.0 + 100.0 * u(rng);
        const double base = sigma_star(l, es, c).sigma_star;
        for (double factor : {2.0, 0.25, 1024.0})
            CHECK(sigma_star(l * factor, es, c * factor).sigma_star == base);
    }
}

TEST_CASE("capacity holds for every service shape")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 8; ++k) {
        const double l = 20.0 + 300.0 * u(rng);
        const double es = 0.5 + 5.0 * u(rng);
        const double c = 5.0 + 60.0 * u(rng);
        const std::vector<ServiceModel> services{
            make_exponential(1.0 / es), make_deterministic(es), make_discrete({{0.5, 0.5 * es}, {0.5, 1.5 * es}}),
            make_hyperexponential({{0.5, 2.0 / (0.5 * es)}, {0.5, 2.0 / (1.5 * es)}}),
            testing::tabulated_exponential(1.0 / es, es / 10.0, 30.0 * es)};
        for (const ServiceModel& s : services) {
            // the tabulated law's mean is a little off es; the guarantee is for the law's own mean
            const FlattenSolution f = sigma_star(l, mean(s), c);
            const GaussianRate a = make_gaussian_rate(l, 10, f.sigma_star);
            const double lo = 10.0 - 6.0 * f.sigma_star;
            const double hi = 10.0 + 6.0 * f.sigma_star + 10.0 * es;
            CHECK(max_load_on_grid(a, s, lo, hi, 2001) <= c + 1e-9);
        }
    }
}

TEST_CASE("gamma capacity spread")
{
    CHECK(gamma_capacity_spread(100, 5, 1, 9.768) == doctest::Approx(0.5).epsilon(1e-4));
    const double b = gamma_capacity_spread(100, 5, 1, 9.768);
    CHECK(gamma_capacity_spread(100, 5, 1, 2 * 9.768) == doctest::Approx(2 * b).epsilon(1e-15));
    CHECK(gamma_capacity_spread(100, 1, 2, 50) == doctest::Approx(0.25).epsilon(1e-15));
    for (double alpha : {1.0, 2.5, 5.0, 10.0}) {
        const double beta = gamma_capacity_spread(100, alpha, 2, 30);
        const GammaRate a = make_gamma_rate(100, alpha, beta);
        CHECK(load_bound(a, make_exponential(0.5)) == doctest::Approx(30.0).epsilon(1e-12));
        const double hi = (alpha + 10.0 * std::sqrt(alpha)) / beta + 20.0;
        CHECK(max_load_on_grid(a, make_exponential(0.5), 0.0, hi, 4001) <= 30.0 + 1e-9);
        CHECK(max_load_on_grid(a, make_deterministic(2.0), 0.0, hi, 4001) <= 30.0 + 1e-9);
    }
    CHECK_THROWS_AS(gamma_capacity_spread(100, 0.5, 1, 10), std::invalid_argument);
    CHECK_THROWS_AS(gamma_capacity_spread(100, 5, 1, 0), std::invalid_argument);
}

TEST_CASE("rounding")
{
    CHECK(round_half_up(46.5) == 47);
    CHECK(round_half_up(46.49) == 46);
    CHECK(round_half_up(0.0) == 0);
    CHECK(round_half_up(22.5) == 23);
}

TEST_CASE("peak reductions between flattened scenarios")
{
    struct Pair {
        ArrivalModel base, flat;
        ServiceModel service;
        long arrival, queue;
    };
    const Pair pairs[] = {
        {make_gaussian_rate(100, 10, 2), make_gaussian_rate(100, 20, 4), make_exponential(1.0), 50, 47},
        {make_gaussian_rate(100, 10, 2), make_gaussian_rate(100, 20, 4), make_exponential(0.5), 50, 42},
        {make_gaussian_rate(100, 10, 2), make_gaussian_rate(100, 20, 4), make_exponential(0.1), 50, 23},
        {make_gamma_rate(100, 5, 0.5), make_gamma_rate(100, 10, 0.5), make_exponential(1.0), -1, 31},
        {make_gamma_rate(100, 5, 0.5), make_gamma_rate(100, 10, 0.5), make_exponential(0.1), -1, 16},
    };
    for (const Pair& p : pairs) {
        const ReductionReport r = reduction_report(peak_time(p.base, p.service), peak_time(p.flat, p.service));
        CHECK(r.queue_percent == p.queue);
        if (p.arrival >= 0) CHECK(r.arrival_percent == p.arrival);
        CHECK(r.queue_reduction == doctest::Approx(double(p.queue)).epsilon(0.5 / p.queue));
    }
}
