#include "mtginf/roots.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace mtginf {

GoldenResult golden_section_max(const std::function<double(double)>& f, double lo, double hi, double x_tol,
                                int max_iterations)
{
    if (!(lo < hi)) throw std::invalid_argument("golden_section_max: need lo < hi");
    constexpr double inv_phi = 0.618033988749894848204586834365638118;

    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    int it = 0;
    for (; it < max_iterations && (b - a) > x_tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        }
        else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    GoldenResult r;
    r.lo = a;
    r.hi = b;
    r.iterations = it;
    if (fc >= fd) {
        r.x = c;
        r.fx = fc;
    }
    else {
        r.x = d;
        r.fx = fd;
    }
    return r;
}

RootResult brent_root(const std::function<double(double)>& f, double a, double b, double x_tol, int max_iterations)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double fa = f(a);
    double fb = f(b);
    RootResult r;
    if (fa == 0.0) return {a, 0.0, 0, true};
    if (fb == 0.0) return {b, 0.0, 0, true};
    if ((fa > 0.0) == (fb > 0.0)) {
        throw std::invalid_argument("brent_root: root is not bracketed");
    }

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    for (int it = 1; it <= max_iterations; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 0.5 * x_tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) {
            return {b, fb, it, true};
        }
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p;
            double q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            }
            else {
                const double qa = fa / fc;
                const double rr = fb / fc;
                p = s * (2.0 * m * qa * (qa - rr) - (b - a) * (rr - 1.0));
                q = (qa - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            else
                p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            }
            else {
                d = m;
                e = m;
            }
        }
        else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        r.iterations = it;
    }
    r.x = b;
    r.fx = fb;
    r.converged = false;
    return r;
}

}  // namespace mtginf
