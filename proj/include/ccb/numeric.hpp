#pragma once
// Shared numeric kernels: stable log/exp forms, the classical Bennett
// g function with its inverse, and the standard normal CDF/quantile.

#include <cmath>
#include <limits>

namespace ccb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ln(1 + e^x), stable for any x.
inline double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// 1 / (1 + e^{-x}), stable for any x.
inline double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// ln(e^a + e^b) without overflow.
inline double log_add_exp(double a, double b) {
    if (a == -kInf && b == -kInf) return -kInf;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// g : u >= 0 -> (1+u) ln(1+u) - u.
double bennett_g(double u);

// Inverse of g on [0, inf).  Contract: |g(g_inv(v)) - v| <= 1e-12 * max(1, v).
double bennett_g_inv(double v);

// Standard normal CDF and its inverse.  The quantile is a rational
// approximation polished by Halley steps against the erfc-based CDF;
// absolute error <= 1e-9 over (0, 1).
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace ccb
