#pragma once

#include "mtginf/arrival_rates.hpp"
#include "mtginf/peak_analysis.hpp"
#include "mtginf/service_dists.hpp"

namespace mtginf {

/// Spread that caps the peak load at `capacity` whatever the service shape.
struct FlattenSolution {
    double sigma_star = 0.0;
    double implied_bound = 0.0;  // lambda* E[S] / (sigma* sqrt(2 pi))
    double capacity = 0.0;
};

FlattenSolution sigma_star(double lambda_star, double mean_service, double capacity);

/// Largest Gamma rate beta whose peak-load bound stays at or under capacity.
/// alpha = 1 uses the t = 0 value lambda* beta of the rate.
double gamma_capacity_spread(double lambda_star, double alpha, double mean_service, double capacity);

/// Round half up to an integer.
long round_half_up(double x);

struct ReductionReport {
    double arrival_reduction = 0.0;  // 100 (1 - flat / base), unrounded
    double queue_reduction = 0.0;
    long arrival_percent = 0;
    long queue_percent = 0;
};

ReductionReport reduction_report(const PeakReport& base, const PeakReport& flat);

/// max of q(t) over n evenly spaced points of [lo, hi].
double max_load_on_grid(const ArrivalModel& a, const ServiceModel& s, double lo, double hi, int n);

}  // namespace mtginf
