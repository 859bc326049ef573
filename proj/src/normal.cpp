#include "mtginf/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mtginf::normal {

namespace {

constexpr double inv_sqrt2 = 0.707106781186547524400844362104849039;

// Beyond this the erfc route loses everything to underflow; switch to the
// continued fraction.
constexpr double cf_threshold = 20.0;

// Modified Lentz evaluation of 1/(w + 1/(w + 2/(w + 3/(w + ...)))) starting
// the partial numerators at `first`.
double mills_fraction(double w, int first)
{
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    double f = tiny;
    double c = f;
    double d = 0.0;
    for (int k = 0; k < 5000; ++k) {
        const double a = (k == 0) ? 1.0 : static_cast<double>(first + k - 1);
        const double b = w;
        d = b + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return f;
}

}  // namespace

double pdf(double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }

double log_pdf(double x) { return -0.5 * x * x - log_sqrt_2pi; }

double cdf(double x) { return 0.5 * std::erfc(-x * inv_sqrt2); }

double ccdf(double x) { return 0.5 * std::erfc(x * inv_sqrt2); }

double log_cdf(double x)
{
    if (x > 0.0) return std::log1p(-ccdf(x));
    if (x > -cf_threshold) return std::log(cdf(x));
    return log_pdf(x) + std::log(upper_mills(-x));
}

double upper_mills(double w)
{
    if (w >= cf_threshold) {
        // 1/(w + 1/(w + 2/(w + ...)))
        return mills_fraction(w, 1);
    }
    return std::exp(std::log(ccdf(w)) - log_pdf(w));
}

double inverse_mills(double y)
{
    const double m = upper_mills(-y);
    if (std::isinf(m)) return 0.0;
    return 1.0 / m;
}

double inverse_mills_plus(double z)
{
    if (z > -5.0) return inverse_mills(z) + z;
    // With w = -z, 1/M(w) = w + T(w) where T = 1/(w + 2/(w + 3/(w + ...))).
    return mills_fraction(-z, 2);
}

}  // namespace mtginf::normal
