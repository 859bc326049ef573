#include "mtginf/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace mtginf {

namespace {

// Kronrod abscissae in decreasing order; odd indices are the Gauss nodes.
constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gk15(const Integrand& f, double a, double b)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();

    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double abs_half = std::abs(half);

    std::array<double, 7> lower{};
    std::array<double, 7> upper{};

    const double fc = f(centre);
    double gauss = fc * gauss_weights[3];
    double kronrod = fc * kronrod_weights[7];
    double resabs = std::abs(kronrod);

    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double f1 = f(centre - dx);
        const double f2 = f(centre + dx);
        lower[j] = f1;
        upper[j] = f2;
        kronrod += kronrod_weights[j] * (f1 + f2);
        resabs += kronrod_weights[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * (f1 + f2);
    }

    const double mean = 0.5 * kronrod;
    double resasc = kronrod_weights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        resasc += kronrod_weights[j] * (std::abs(lower[j] - mean) + std::abs(upper[j] - mean));
    }

    const double value = kronrod * half;
    resabs *= abs_half;
    resasc *= abs_half;
    double error = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && error != 0.0) {
        error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
    }
    if (resabs > uflow / (50.0 * eps)) {
        error = std::max(50.0 * eps * resabs, error);
    }
    return {a, b, value, error};
}

std::vector<double> partition(double a, double b, std::span<const double> breakpoints)
{
    std::vector<double> cuts;
    cuts.reserve(breakpoints.size() + 2);
    cuts.push_back(a);
    for (double x : breakpoints) {
        if (std::isfinite(x) && x > a && x < b) cuts.push_back(x);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

}  // namespace

QuadratureResult integrate_gk(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                              const QuadratureOptions& options)
{
    if (!(std::isfinite(a) && std::isfinite(b))) {
        throw std::invalid_argument("integrate_gk: limits must be finite");
    }
    QuadratureResult result;
    if (a == b) {
        result.converged = true;
        return result;
    }
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::priority_queue<Panel> panels;
    double total = 0.0;
    double total_error = 0.0;
    const auto cuts = partition(a, b, breakpoints);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Panel p = gk15(f, cuts[i], cuts[i + 1]);
        result.evaluations += 15;
        total += p.value;
        total_error += p.error;
        panels.push(p);
    }

    const double min_width = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    while (total_error > std::max(options.abs_tol, options.rel_tol * std::abs(total)) &&
           panels.size() < options.max_intervals) {
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a <= min_width) break;
        panels.pop();
        const Panel left = gk15(f, worst.a, mid);
        const Panel right = gk15(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    total_error = 0.0;
    while (!panels.empty()) {
        total += panels.top().value;
        total_error += panels.top().error;
        panels.pop();
    }
    result.value = sign * total;
    result.error = total_error;
    result.converged = total_error <= std::max(options.abs_tol, options.rel_tol * std::abs(total));
    return result;
}

namespace {

struct SimpsonState {
    const Integrand& f;
    std::size_t subdivisions = 0;
    std::size_t max_subdivisions = 0;
    std::size_t evaluations = 0;
    double error = 0.0;
    bool exhausted = false;
};

double simpson_step(SimpsonState& st, double a, double fa, double m, double fm, double b, double fb, double whole,
                    double tol, int depth)
{
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.f(lm);
    const double frm = st.f(rm);
    st.evaluations += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(left + right);
    if (std::abs(delta) <= std::max(15.0 * tol, floor) || depth >= 60) {
        st.error += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    if (st.subdivisions >= st.max_subdivisions) {
        st.exhausted = true;
        st.error += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    ++st.subdivisions;
    return simpson_step(st, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1) +
           simpson_step(st, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

QuadratureResult integrate_simpson(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                                   double abs_tol, std::size_t max_subdivisions)
{
    if (!(std::isfinite(a) && std::isfinite(b)) || b < a) {
        throw std::invalid_argument("integrate_simpson: need finite a <= b");
    }
    QuadratureResult result;
    if (a == b) {
        result.converged = true;
        return result;
    }
    SimpsonState st{f, 0, max_subdivisions, 0, 0.0, false};
    const auto cuts = partition(a, b, breakpoints);
    const double width = b - a;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo);
        const double fmid = f(mid);
        const double fhi = f(hi);
        st.evaluations += 3;
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_step(st, lo, flo, mid, fmid, hi, fhi, whole, abs_tol * (hi - lo) / width, 0);
    }
    result.value = total;
    result.error = st.error;
    result.evaluations = st.evaluations;
    result.converged = !st.exhausted;
    return result;
}

}  // namespace mtginf
