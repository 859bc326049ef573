#pragma once

#include "mtginf/empirics.hpp"
#include "mtginf/flatten.hpp"
#include "mtginf/mc_sim.hpp"
#include "mtginf/peak_analysis.hpp"
#include "mtginf/service_dists.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace mtginf {

/// 12 significant digits, "%.12g".
std::string format_number(double x);

/// x rounded to 12 significant digits, so JSON and CSV carry the same value.
/// Non-finite values become null.
nlohmann::json json_number(double x);

nlohmann::json to_json(const ArrivalModel& a);
nlohmann::json to_json(const ServiceModel& s);
nlohmann::json to_json(const PeakReport& r);
nlohmann::json to_json(const FlattenSolution& f);
nlohmann::json to_json(const ReductionReport& r);
nlohmann::json to_json(const SimResult& r);
nlohmann::json to_json(const GofResult& g);
nlohmann::json to_json(const FitResult& f);
nlohmann::json to_json(const LagTable& t);

/// Header plus rows, RFC-4180 quoting where a field needs it.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
    std::size_t width_;
};

}  // namespace mtginf
