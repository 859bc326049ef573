#pragma once

#include "mtginf/arrival_rates.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mtginf {

/// Daily counts. days are day indices (strictly increasing); day d covers
/// [d, d + 1). origin is the absolute day number of day 0, used to line up
/// two series read from different files.
struct DailySeries {
    std::vector<std::int64_t> days;
    std::vector<double> counts;
    std::string label;
    std::int64_t origin = 0;
};

void validate(const DailySeries& s);

enum class Family { gaussian, gamma };

const char* to_string(Family f);

struct FitResult {
    ArrivalModel model;
    double sse = 0.0;
    int iterations = 0;  // summed over all starts
    bool converged = false;
};

/// Unweighted least squares of the counts against lambda(d + 0.5), multi-start
/// Nelder-Mead. Throws std::invalid_argument for fewer than 5 points or a zero total.
FitResult fit(const DailySeries& series, Family family);

struct LagTable {
    std::vector<double> quantiles;
    std::vector<std::int64_t> lags;  // days
};

std::vector<double> default_quantiles();

/// For each q: first day the deaths cdf reaches q minus first day the arrivals
/// cdf reaches q. Days are compared on the absolute scale origin + day.
LagTable cdf_lag_table(const DailySeries& arrivals, const DailySeries& deaths,
                       const std::vector<double>& quantiles = default_quantiles());

DailySeries normalize_peak(const DailySeries& s);

/// `date,count` CSV. Dates are ISO (YYYY-MM-DD) or integer day numbers; a
/// header row is skipped. Days become offsets from the first row. Negative
/// counts are clamped to 0 and reported through `warnings` when given.
DailySeries read_series_csv(const std::string& path, const std::string& label = {},
                            std::vector<std::string>* warnings = nullptr);

}  // namespace mtginf
