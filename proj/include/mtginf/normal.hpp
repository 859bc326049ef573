#pragma once

// Standard normal density, distribution and Mills-ratio helpers that stay
// accurate far into both tails.

namespace mtginf::normal {

inline constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934381868;
inline constexpr double sqrt_2pi = 2.50662827463100050241576528481104525;
inline constexpr double log_sqrt_2pi = 0.918938533204672741780329736405617640;

double pdf(double x);
double log_pdf(double x);
double cdf(double x);
/// Upper tail 1 - Phi(x), without cancellation for large x.
double ccdf(double x);
double log_cdf(double x);

/// Mills ratio (1 - Phi(w)) / phi(w).
double upper_mills(double w);

/// Inverse Mills ratio phi(y) / Phi(y). Strictly decreasing, ~ -y as y -> -inf.
double inverse_mills(double y);

/// phi(z)/Phi(z) + z, evaluated by continued fraction in the left tail where
/// the direct sum cancels. Equals E[z - Z | Z <= z] for standard normal Z.
double inverse_mills_plus(double z);

}  // namespace mtginf::normal
