#include "mtginf/serialize.hpp"

#include "mtginf/detail/overloaded.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace mtginf {

using detail::overloaded;
using nlohmann::json;

std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json json_number(double x)
{
    if (!std::isfinite(x)) return nullptr;
    return std::strtod(format_number(x).c_str(), nullptr);
}

json to_json(const ArrivalModel& a)
{
    return std::visit(overloaded{
                          [](const GaussianRate& g) -> json {
                              return {{"family", "gaussian"},
                                      {"lambda_star", json_number(g.lambda_star)},
                                      {"tau", json_number(g.tau)},
                                      {"sigma", json_number(g.sigma)}};
                          },
                          [](const GammaRate& g) -> json {
                              return {{"family", "gamma"},
                                      {"lambda_star", json_number(g.lambda_star)},
                                      {"alpha", json_number(g.alpha)},
                                      {"beta", json_number(g.beta)}};
                          },
                      },
                      a);
}

json to_json(const ServiceModel& s)
{
    json j = std::visit(overloaded{
                            [](const Exponential& e) -> json { return {{"family", "exponential"}, {"mu", json_number(e.mu)}}; },
                            [](const Deterministic& d) -> json {
                                return {{"family", "deterministic"}, {"delta", json_number(d.delta)}};
                            },
                            [](const Discrete& d) -> json {
                                json atoms = json::array();
                                for (const Atom& a : d.atoms)
                                    atoms.push_back({{"p", json_number(a.p)}, {"delta", json_number(a.delta)}});
                                return {{"family", "discrete"}, {"atoms", atoms}};
                            },
                            [](const HyperExponential& h) -> json {
                                json br = json::array();
                                for (const Branch& b : h.branches)
                                    br.push_back({{"p", json_number(b.p)}, {"mu", json_number(b.mu)}});
                                return {{"family", "hyperexponential"}, {"branches", br}};
                            },
                            [](const Tabulated& t) -> json {
                                return {{"family", "tabulated"}, {"points", t.grid().size()}};
                            },
                        },
                        s);
    j["mean"] = json_number(mean(s));
    return j;
}

json to_json(const PeakReport& r)
{
    return {{"t_star", json_number(r.t_star)},
            {"q_star", json_number(r.q_star)},
            {"lag", json_number(r.lag)},
            {"lower_bound", json_number(r.lower_bound)},
            {"upper_bound", json_number(r.upper_bound)},
            {"rate_peak", json_number(r.rate_peak)},
            {"method", to_string(r.method)},
            {"iterations", r.iterations},
            {"residual", json_number(r.residual)}};
}

json to_json(const FlattenSolution& f)
{
    return {{"sigma_star", json_number(f.sigma_star)},
            {"implied_bound", json_number(f.implied_bound)},
            {"capacity", json_number(f.capacity)}};
}

json to_json(const ReductionReport& r)
{
    return {{"arrival_reduction", json_number(r.arrival_reduction)},
            {"queue_reduction", json_number(r.queue_reduction)},
            {"arrival_percent", r.arrival_percent},
            {"queue_percent", r.queue_percent}};
}

json to_json(const SimResult& r)
{
    json rows = json::array();
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        rows.push_back({{"t", json_number(r.grid[i])},
                        {"mean", json_number(r.mean[i])},
                        {"variance", json_number(r.variance[i])},
                        {"histogram", r.histograms[i]}});
    }
    return {{"seed", r.seed},
            {"replications", r.replications},
            {"arrivals_total", r.arrivals_total},
            {"arrivals_mean", json_number(r.arrivals_mean)},
            {"warnings", r.warnings},
            {"points", rows}};
}

json to_json(const GofResult& g)
{
    return {{"statistic", json_number(g.statistic)},
            {"dof", g.dof},
            {"p_value", json_number(g.p_value)},
            {"bins", g.bins}};
}

json to_json(const FitResult& f)
{
    return {{"model", to_json(f.model)},
            {"sse", json_number(f.sse)},
            {"iterations", f.iterations},
            {"converged", f.converged}};
}

json to_json(const LagTable& t)
{
    json rows = json::array();
    for (std::size_t i = 0; i < t.quantiles.size(); ++i)
        rows.push_back({{"quantile", json_number(t.quantiles[i])}, {"lag_days", t.lags[i]}});
    return {{"lags", rows}};
}

namespace {

std::string quote(const std::string& f)
{
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    return q;
}

}  // namespace

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out)
    , width_(header.size())
{
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields)
{
    if (fields.size() != width_) throw std::logic_error("csv: row width does not match header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << quote(fields[i]);
    }
    out_ << '\n';
}

}  // namespace mtginf
