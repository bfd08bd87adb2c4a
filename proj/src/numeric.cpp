#include "ccb/numeric.hpp"

#include <stdexcept>

namespace ccb {

double bennett_g(double u) {
    if (u < 0.0) throw std::domain_error("bennett_g: u must be >= 0");
    // (1+u)ln(1+u) - u; log1p keeps small-u accuracy (g(u) ~ u^2/2).
    return (1.0 + u) * std::log1p(u) - u;
}

double bennett_g_inv(double v) {
    if (v < 0.0) throw std::domain_error("bennett_g_inv: v must be >= 0");
    if (v == 0.0) return 0.0;

    // Safeguarded Newton.  g is increasing and convex, g(u) <= u^2/2 and
    // g(u) >= u ln(1+u) - u, so u0 below always starts right of the root
    // and Newton descends monotonically; a bracket guards against stalls.
    double u = std::max(std::sqrt(2.0 * v), v / std::log1p(v));
    double lo = 0.0, hi = u;
    while (bennett_g(hi) < v) {  // paranoia: expand if u0 underestimates
        lo = hi;
        hi *= 2.0;
    }
    u = hi;
    const double tol = 1e-13 * std::max(1.0, v);
    for (int it = 0; it < 200; ++it) {
        const double f = bennett_g(u) - v;
        if (std::abs(f) <= tol) return u;
        if (f > 0.0) hi = u; else lo = u;
        const double step = f / std::log1p(u);
        double next = u - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
        u = next;
    }
    return u;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Acklam's rational approximation for the probit function, then two
// Halley refinements against normal_cdf.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must lie in (0,1)");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    static const double sqrt_2pi = std::sqrt(2.0 * std::acos(-1.0));
    for (int it = 0; it < 2; ++it) {
        const double e = normal_cdf(x) - p;
        const double u = e * sqrt_2pi * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);  // Halley step
    }
    return x;
}

}  // namespace ccb
