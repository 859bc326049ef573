#include "mtginf/cli.hpp"

#include "mtginf/empirics.hpp"
#include "mtginf/errors.hpp"
#include "mtginf/flatten.hpp"
#include "mtginf/mc_sim.hpp"
#include "mtginf/offered_load.hpp"
#include "mtginf/peak_analysis.hpp"
#include "mtginf/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace mtginf {

using nlohmann::json;

namespace {

struct Options {
    std::string out_path;
    std::string format = "csv";

    std::string arrival = "gaussian";
    double lambda_star = 100.0;
    double tau = 10.0;
    double sigma = 2.0;
    double alpha = 5.0;
    double beta = 0.5;

    std::string service = "exp";
    double mu = 1.0;
    double delta = 1.0;
    std::string atoms;
    std::string branches;
    std::string survival_path;

    double start = 0.0;
    double stop = 0.0;
    double step = 0.1;

    double capacity = 0.0;
    double mean_service = 0.0;

    std::int64_t reps = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double t0 = 0.0;
    double t1 = 0.0;

    std::string input;
    std::string family = "gaussian";
    std::string arrivals_path;
    std::string deaths_path;
    std::vector<double> quantiles;
};

// "a:b,c:d" -> {(a, b), (c, d)}
std::vector<std::pair<double, double>> parse_pairs(const std::string& text, const char* what)
{
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw std::invalid_argument(std::string(what) + ": expected p:value pairs");
        try {
            out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        } catch (const std::logic_error&) {
            throw std::invalid_argument(std::string(what) + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
    return out;
}

ArrivalModel arrival_from(const Options& o)
{
    if (o.arrival == "gaussian") return make_gaussian_rate(o.lambda_star, o.tau, o.sigma);
    return make_gamma_rate(o.lambda_star, o.alpha, o.beta);
}

ServiceModel service_from(const Options& o)
{
    if (o.service == "exp") return make_exponential(o.mu);
    if (o.service == "det") return make_deterministic(o.delta);
    if (o.service == "discrete") {
        std::vector<Atom> atoms;
        for (auto [p, d] : parse_pairs(o.atoms, "--atoms")) atoms.push_back({p, d});
        return make_discrete(std::move(atoms));
    }
    if (o.service == "hyperexp") {
        std::vector<Branch> br;
        for (auto [p, m] : parse_pairs(o.branches, "--branches")) br.push_back({p, m});
        return make_hyperexponential(std::move(br));
    }
    if (o.survival_path.empty()) throw std::invalid_argument("--service tabulated needs --survival PATH");
    return load_tabulated_csv(o.survival_path);
}

struct Grid {
    double start;
    double stop;
    double step;
};

Grid grid_from(const Options& o, const CLI::App& app, const ArrivalModel& a, const ServiceModel& s)
{
    const double mode = mode_time(a);
    const double w = spread(a);
    Grid g{std::max(support_start(a), mode - 4.0 * w), mode + 4.0 * w + 4.0 * ExcessLaw(s).mean(), o.step};
    if (app.count("--start")) g.start = o.start;
    if (app.count("--stop")) g.stop = o.stop;
    if (!(g.step > 0.0)) throw std::invalid_argument("--step must be > 0");
    if (!(g.stop >= g.start)) throw std::invalid_argument("--stop must be >= --start");
    return g;
}

std::vector<double> grid_points(const Grid& g)
{
    std::vector<double> t;
    const auto n = static_cast<std::int64_t>(std::floor((g.stop - g.start) / g.step * (1.0 + 1e-12))) + 1;
    if (n > 10000000) throw std::invalid_argument("grid: more than 1e7 points");
    for (std::int64_t i = 0; i < n; ++i) t.push_back(g.start + static_cast<double>(i) * g.step);
    return t;
}

std::string num(double x) { return format_number(x); }

// One record as a one-row CSV or a flat JSON object.
void emit_record(std::ostream& out, bool as_json, const std::vector<std::pair<std::string, json>>& fields)
{
    if (as_json) {
        json j = json::object();
        for (const auto& [k, v] : fields) j[k] = v;
        out << j.dump(2) << '\n';
        return;
    }
    std::vector<std::string> header;
    std::vector<std::string> row;
    for (const auto& [k, v] : fields) {
        header.push_back(k);
        if (v.is_string()) row.push_back(v.get<std::string>());
        else if (v.is_number_float()) row.push_back(num(v.get<double>()));
        else if (v.is_null()) row.emplace_back();
        else row.push_back(v.dump());
    }
    CsvWriter w(out, header);
    w.row(row);
}

std::vector<std::pair<std::string, json>> peak_fields(const PeakReport& r)
{
    std::vector<std::pair<std::string, json>> f;
    const json j = to_json(r);
    for (const auto& [k, v] : j.items()) f.emplace_back(k, v);
    // json objects iterate in key order; keep a fixed, readable column order
    static const std::vector<std::string> order{"t_star",   "q_star",    "lag",        "lower_bound", "upper_bound",
                                                "rate_peak", "method",   "iterations", "residual"};
    std::sort(f.begin(), f.end(), [](const auto& a, const auto& b) {
        return std::find(order.begin(), order.end(), a.first) < std::find(order.begin(), order.end(), b.first);
    });
    return f;
}

void cmd_rate(const Options& o, const CLI::App& app, std::ostream& out)
{
    const ArrivalModel a = arrival_from(o);
    const auto t = grid_points(grid_from(o, app, a, make_exponential(1.0)));
    if (o.format == "json") {
        json pts = json::array();
        for (double x : t) pts.push_back({{"t", json_number(x)}, {"rate", json_number(rate_at(a, x))}});
        out << json{{"arrival", to_json(a)}, {"points", pts}}.dump(2) << '\n';
        return;
    }
    CsvWriter w(out, {"t", "rate"});
    for (double x : t) w.row({num(x), num(rate_at(a, x))});
}

void cmd_load(const Options& o, const CLI::App& app, std::ostream& out)
{
    const ArrivalModel a = arrival_from(o);
    const ServiceModel s = service_from(o);
    const auto t = grid_points(grid_from(o, app, a, s));
    const LoadCurve c = load_curve(a, s, t);
    const std::string prov = to_string(c.provenance);
    if (o.format == "json") {
        json grid = json::array();
        json values = json::array();
        for (std::size_t i = 0; i < t.size(); ++i) {
            grid.push_back(json_number(t[i]));
            values.push_back(json_number(c.values[i]));
        }
        out << json{{"arrival", to_json(a)}, {"service", to_json(s)}, {"provenance", prov}, {"grid", grid}, {"values", values}}
                   .dump(2)
            << '\n';
        return;
    }
    CsvWriter w(out, {"t", "q", "provenance"});
    for (std::size_t i = 0; i < t.size(); ++i) w.row({num(t[i]), num(c.values[i]), prov});
}

void cmd_peak(const Options& o, std::ostream& out)
{
    const ArrivalModel a = arrival_from(o);
    const ServiceModel s = service_from(o);
    const PeakReport r = peak_time(a, s);
    if (o.format == "json") {
        json j = to_json(r);
        j["arrival"] = to_json(a);
        j["service"] = to_json(s);
        out << j.dump(2) << '\n';
        return;
    }
    emit_record(out, false, peak_fields(r));
}

void cmd_lag(const Options& o, std::ostream& out)
{
    if (o.arrival != "gaussian") throw std::invalid_argument("lag: needs --arrival gaussian");
    const GaussianRate g = make_gaussian_rate(o.lambda_star, o.tau, o.sigma);
    const ServiceModel s = service_from(o);
    PeakReport r;
    std::string method;
    double lo = 0.0;
    double hi = 0.0;
    if (std::holds_alternative<Exponential>(s) || std::holds_alternative<Deterministic>(s) ||
        std::holds_alternative<HyperExponential>(s)) {
        r = peak_closed_form(g, s);
    } else {
        r = peak_time(g, s);
    }
    method = to_string(r.method);
    if (const auto* e = std::get_if<Exponential>(&s)) {
        std::tie(lo, hi) = lag_bounds_exp(e->mu, g.sigma);
    } else {
        lo = r.lower_bound - g.tau;
        hi = r.upper_bound - g.tau;
    }
    emit_record(out, o.format == "json",
                {{"lag", json_number(r.lag)},
                 {"lag_lower", json_number(lo)},
                 {"lag_upper", json_number(hi)},
                 {"t_star", json_number(r.t_star)},
                 {"q_star", json_number(r.q_star)},
                 {"method", method}});
}

void cmd_flatten(const Options& o, const CLI::App& app, std::ostream& out)
{
    if (!(o.capacity > 0.0)) throw std::invalid_argument("flatten: --capacity must be > 0");
    const ServiceModel s = service_from(o);
    const double es = app.count("--mean-service") ? o.mean_service : mean(s);
    const ArrivalModel base = arrival_from(o);
    ArrivalModel flat;
    std::vector<std::pair<std::string, json>> f;
    double lo = 0.0;
    double hi = 0.0;
    if (o.arrival == "gaussian") {
        const FlattenSolution sol = sigma_star(o.lambda_star, es, o.capacity);
        flat = make_gaussian_rate(o.lambda_star, o.tau, sol.sigma_star);
        f = {{"family", "gaussian"},
             {"sigma_star", json_number(sol.sigma_star)},
             {"implied_bound", json_number(sol.implied_bound)},
             {"capacity", json_number(sol.capacity)}};
        lo = o.tau - 8.0 * sol.sigma_star;
        hi = o.tau + 8.0 * sol.sigma_star + 8.0 * es;
    } else {
        const double b = gamma_capacity_spread(o.lambda_star, o.alpha, es, o.capacity);
        flat = make_gamma_rate(o.lambda_star, o.alpha, b);
        f = {{"family", "gamma"},
             {"beta_star", json_number(b)},
             {"implied_bound", json_number(peak_rate_bound(flat) * es)},
             {"capacity", json_number(o.capacity)}};
        lo = 0.0;
        hi = mode_time(flat) + 8.0 * spread(flat) + 8.0 * es;
    }
    const double max_q = max_load_on_grid(flat, s, lo, hi, 4001);
    const ReductionReport red = reduction_report(peak_time(base, s), peak_time(flat, s));
    f.emplace_back("peak_check_max_load", json_number(max_q));
    f.emplace_back("peak_check_ok", max_q <= o.capacity + 1e-9);
    f.emplace_back("arrival_reduction_percent", red.arrival_percent);
    f.emplace_back("queue_reduction_percent", red.queue_percent);
    if (o.format == "json") {
        json j = json::object();
        for (std::size_t i = 0; i < 4; ++i) j[f[i].first] = f[i].second;
        j["peak_check"] = {{"max_load", json_number(max_q)}, {"within_capacity", max_q <= o.capacity + 1e-9}};
        j["reductions"] = to_json(red);
        out << j.dump(2) << '\n';
        return;
    }
    emit_record(out, false, f);
}

void cmd_simulate(const Options& o, const CLI::App& app, std::ostream& out, std::ostream& err)
{
    SimConfig cfg;
    cfg.arrival = arrival_from(o);
    cfg.service = service_from(o);
    cfg.grid = grid_points(grid_from(o, app, cfg.arrival, cfg.service));
    const double mode = mode_time(cfg.arrival);
    const double w = spread(cfg.arrival);
    cfg.t0 = app.count("--t0") ? o.t0 : std::min(cfg.grid.front(), std::max(support_start(cfg.arrival), mode - 8.0 * w));
    cfg.t1 = app.count("--t1") ? o.t1 : std::max(cfg.grid.back(), mode + 8.0 * w);
    if (!(cfg.t1 > cfg.t0)) cfg.t1 = cfg.t0 + 1.0;
    cfg.replications = o.reps;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    const SimResult r = simulate(cfg);
    for (const auto& msg : r.warnings) err << "warning: " << msg << '\n';
    std::vector<double> q;
    for (double t : r.grid) q.push_back(evaluate_load(cfg.arrival, cfg.service, t).value);
    if (o.format == "json") {
        json j = to_json(r);
        for (std::size_t i = 0; i < q.size(); ++i) j["points"][i]["load"] = json_number(q[i]);
        out << j.dump(2) << '\n';
        return;
    }
    CsvWriter wr(out, {"t", "mean", "variance", "load", "seed"});
    for (std::size_t i = 0; i < r.grid.size(); ++i)
        wr.row({num(r.grid[i]), num(r.mean[i]), num(r.variance[i]), num(q[i]), std::to_string(r.seed)});
}

void cmd_fit(const Options& o, std::ostream& out, std::ostream& err)
{
    if (o.input.empty()) throw std::invalid_argument("fit: --input PATH is required");
    std::vector<std::string> warnings;
    const DailySeries s = read_series_csv(o.input, {}, &warnings);
    for (const auto& msg : warnings) err << "warning: " << msg << '\n';
    const Family fam = o.family == "gamma" ? Family::gamma : Family::gaussian;
    const FitResult r = fit(s, fam);
    if (!r.converged) err << "warning: fit did not converge; best iterate reported\n";
    json p1;
    json p2;
    json p3;
    json p4;
    if (const auto* g = std::get_if<GaussianRate>(&r.model)) {
        p1 = json_number(g->tau);
        p2 = json_number(g->sigma);
    } else {
        const auto& gm = std::get<GammaRate>(r.model);
        p3 = json_number(gm.alpha);
        p4 = json_number(gm.beta);
    }
    if (o.format == "json") {
        out << to_json(r).dump(2) << '\n';
        return;
    }
    emit_record(out, false,
                {{"family", to_string(fam)},
                 {"lambda_star", json_number(total_arrivals(r.model))},
                 {"tau", p1},
                 {"sigma", p2},
                 {"alpha", p3},
                 {"beta", p4},
                 {"sse", json_number(r.sse)},
                 {"iterations", r.iterations},
                 {"converged", r.converged}});
}

void cmd_lagtable(const Options& o, std::ostream& out, std::ostream& err)
{
    if (o.arrivals_path.empty() || o.deaths_path.empty())
        throw std::invalid_argument("lagtable: --arrivals PATH and --deaths PATH are required");
    std::vector<std::string> warnings;
    const DailySeries a = read_series_csv(o.arrivals_path, "arrivals", &warnings);
    const DailySeries d = read_series_csv(o.deaths_path, "deaths", &warnings);
    for (const auto& msg : warnings) err << "warning: " << msg << '\n';
    const LagTable t = cdf_lag_table(a, d, o.quantiles.empty() ? default_quantiles() : o.quantiles);
    if (o.format == "json") {
        out << to_json(t).dump(2) << '\n';
        return;
    }
    CsvWriter w(out, {"quantile", "lag_days"});
    for (std::size_t i = 0; i < t.quantiles.size(); ++i) w.row({num(t.quantiles[i]), std::to_string(t.lags[i])});
}

std::string two_dp(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

void cmd_tables(const Options& o, std::ostream& out)
{
    struct Row {
        int table;
        std::string curve;
        std::string family;
        double p1;
        double p2;
        double es;
        double time;
        double value;
    };
    std::vector<Row> rows;
    const double ls = 100.0;
    int table = 1;
    for (double es : {1.0, 2.0, 10.0}) {
        const ServiceModel s = make_exponential(1.0 / es);
        const GaussianRate base = make_gaussian_rate(ls, 10.0, 2.0);
        const GaussianRate flat = make_gaussian_rate(ls, 20.0, 4.0);
        const PeakReport pb = peak_time(base, s);
        const PeakReport pf = peak_time(flat, s);
        rows.push_back({table, "arrival", "gaussian", 10, 2, es, base.tau, peak_rate_bound(base)});
        rows.push_back({table, "flattened_arrival", "gaussian", 20, 4, es, flat.tau, peak_rate_bound(flat)});
        rows.push_back({table, "queue", "gaussian", 10, 2, es, pb.t_star, pb.q_star});
        rows.push_back({table, "flattened_queue", "gaussian", 20, 4, es, pf.t_star, pf.q_star});
        ++table;
    }
    for (double es : {1.0, 10.0}) {
        const ServiceModel s = make_exponential(1.0 / es);
        const GammaRate base = make_gamma_rate(ls, 5.0, 0.5);
        const GammaRate flat = make_gamma_rate(ls, 10.0, 0.5);
        const PeakReport pb = peak_time(base, s);
        const PeakReport pf = peak_time(flat, s);
        rows.push_back({table, "arrival", "gamma", 5, 0.5, es, mode_time(base), peak_rate_bound(base)});
        rows.push_back({table, "flattened_arrival", "gamma", 10, 0.5, es, mode_time(flat), peak_rate_bound(flat)});
        rows.push_back({table, "queue", "gamma", 5, 0.5, es, pb.t_star, pb.q_star});
        rows.push_back({table, "flattened_queue", "gamma", 10, 0.5, es, pf.t_star, pf.q_star});
        ++table;
    }
    if (o.format == "json") {
        json arr = json::array();
        for (const Row& r : rows) {
            const bool gauss = r.family == "gaussian";
            arr.push_back({{"table", r.table},
                           {"curve", r.curve},
                           {"family", r.family},
                           {"lambda_star", json_number(ls)},
                           {gauss ? "tau" : "alpha", json_number(r.p1)},
                           {gauss ? "sigma" : "beta", json_number(r.p2)},
                           {"mean_service", json_number(r.es)},
                           {"peak_time", json_number(r.time)},
                           {"peak_value", json_number(r.value)}});
        }
        out << json{{"rows", arr}}.dump(2) << '\n';
        return;
    }
    CsvWriter w(out, {"table", "curve", "family", "lambda_star", "tau_or_alpha", "sigma_or_beta", "mean_service",
                      "peak_time", "peak_value", "peak_time_2dp", "peak_value_2dp"});
    for (const Row& r : rows) {
        w.row({std::to_string(r.table), r.curve, r.family, num(ls), num(r.p1), num(r.p2), num(r.es), num(r.time),
               num(r.value), two_dp(r.time), two_dp(r.value)});
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Peak load, lag and flattening for infinite-server queues with time-varying arrivals", "mtginf"};
    app.set_config("--config", "", "key=value file supplying defaults; command-line flags win");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--out", o.out_path, "Write output to PATH instead of stdout");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    app.add_option("--arrival", o.arrival, "Arrival family")->check(CLI::IsMember({"gaussian", "gamma"}));
    app.add_option("--lambda-star", o.lambda_star, "Expected total arrivals");
    app.add_option("--tau", o.tau, "Gaussian mode");
    app.add_option("--sigma", o.sigma, "Gaussian spread");
    app.add_option("--alpha", o.alpha, "Gamma shape");
    app.add_option("--beta", o.beta, "Gamma rate");

    app.add_option("--service", o.service, "Service family")
        ->check(CLI::IsMember({"exp", "det", "discrete", "hyperexp", "tabulated"}));
    app.add_option("--mu", o.mu, "Exponential service rate");
    app.add_option("--delta", o.delta, "Deterministic service time");
    app.add_option("--atoms", o.atoms, "Discrete service as p:duration,...");
    app.add_option("--branches", o.branches, "Hyper-exponential service as p:mu,...");
    app.add_option("--survival", o.survival_path, "CSV t,survival for tabulated service");

    app.add_option("--start", o.start, "Grid start (default: from the model)");
    app.add_option("--stop", o.stop, "Grid stop (default: from the model)");
    app.add_option("--step", o.step, "Grid step");

    app.add_option("--capacity", o.capacity, "Capacity C for flatten");
    app.add_option("--mean-service", o.mean_service, "E[S] for flatten (default: mean of --service)");

    app.add_option("--reps", o.reps, "Monte-Carlo replications")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "Random seed");
    app.add_option("--threads", o.threads, "Worker threads (0: all cores)");
    app.add_option("--t0", o.t0, "Simulation horizon start");
    app.add_option("--t1", o.t1, "Simulation horizon end");

    app.add_option("--input", o.input, "date,count CSV to fit");
    app.add_option("--family", o.family, "Family to fit")->check(CLI::IsMember({"gaussian", "gamma"}));
    app.add_option("--arrivals", o.arrivals_path, "Arrival date,count CSV for lagtable");
    app.add_option("--deaths", o.deaths_path, "Death date,count CSV for lagtable");
    app.add_option("--quantiles", o.quantiles, "Quantiles for lagtable")->delimiter(',');

    auto* rate = app.add_subcommand("rate", "Arrival rate on a grid");
    auto* load = app.add_subcommand("load", "Mean offered load on a grid");
    auto* peak = app.add_subcommand("peak", "Peak time, peak load and bounds");
    auto* lag = app.add_subcommand("lag", "Exact lag and lag bounds (Gaussian arrivals)");
    auto* flatten = app.add_subcommand("flatten", "Spread needed to keep the peak load under --capacity");
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo count-in-system statistics");
    auto* fitc = app.add_subcommand("fit", "Fit an arrival model to a daily series");
    auto* lagt = app.add_subcommand("lagtable", "Arrival-vs-death cdf lag by quantile");
    auto* tables = app.add_subcommand("tables", "Reference peak tables for the built-in scenarios");

    std::vector<std::string> argv_store{"mtginf"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::FileError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    std::ostringstream buf;
    try {
        if (*rate) cmd_rate(o, app, buf);
        else if (*load) cmd_load(o, app, buf);
        else if (*peak) cmd_peak(o, buf);
        else if (*lag) cmd_lag(o, buf);
        else if (*flatten) cmd_flatten(o, app, buf);
        else if (*sim) cmd_simulate(o, app, buf, err);
        else if (*fitc) cmd_fit(o, buf, err);
        else if (*lagt) cmd_lagtable(o, buf, err);
        else if (*tables) cmd_tables(o, buf);
    } catch (const NumericError& e) {
        err << "error: " << e.what() << " (residual " << format_number(e.residual()) << ")\n";
        return exit_numeric;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }

    if (o.out_path.empty()) {
        out << buf.str();
    } else {
        std::ofstream f(o.out_path, std::ios::binary);
        if (!f) {
            err << "error: cannot open " << o.out_path << " for writing\n";
            return exit_io;
        }
        f << buf.str();
        if (!f.flush()) {
            err << "error: write to " << o.out_path << " failed\n";
            return exit_io;
        }
    }
    return exit_ok;
}

}  // namespace mtginf
