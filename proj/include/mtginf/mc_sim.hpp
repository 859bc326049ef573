#pragma once

#include "mtginf/arrival_rates.hpp"
#include "mtginf/service_dists.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mtginf {

struct SimConfig {
    ArrivalModel arrival;
    ServiceModel service;
    double t0 = 0.0;
    double t1 = 0.0;
    std::vector<double> grid;  // nondecreasing, inside [t0, t1]
    std::int64_t replications = 1;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct SimResult {
    std::vector<double> grid;
    std::vector<double> mean;
    std::vector<double> variance;  // unbiased; 0 when replications == 1
    /// histograms[i][k] = replications with k customers present at grid[i].
    std::vector<std::vector<std::uint64_t>> histograms;
    std::uint64_t arrivals_total = 0;
    double arrivals_mean = 0.0;  // per replication
    std::uint64_t seed = 0;
    std::int64_t replications = 0;
    std::vector<std::string> warnings;
};

/// Count-in-system sample paths of the M_t/G/inf queue by thinning a
/// homogeneous Poisson stream of rate peak_rate_bound(arrival). Replication r
/// draws from its own generator seeded by (seed, r), so the result does not
/// depend on the thread count.
SimResult simulate(const SimConfig& cfg);

/// Inverse-cdf service draw, u in (0, 1).
double sample_service(const ServiceModel& s, double u);

struct GofResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
    int bins = 0;
};

/// Pearson chi-square of a count histogram against Poisson(mean). Neighbouring
/// counts are pooled until every bin expects at least 5 observations.
GofResult poisson_gof(const std::vector<std::uint64_t>& histogram, double mean);

}  // namespace mtginf
