#include "ccb/baselines.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ccb/numeric.hpp"

namespace ccb {

namespace {

void require_deviation(double d) {
    if (!(d >= 0.0)) throw std::domain_error("log_tail: deviation d must be >= 0");
}

void require_level(double tau, bool allow_one) {
    const bool ok = allow_one ? (tau > 0.0 && tau <= 1.0) : (tau > 0.0 && tau < 1.0);
    if (!ok) throw std::domain_error("confidence: tau outside the admissible interval");
}

double clamp_log(double v) { return std::min(v, 0.0); }

// ln(1 + gamma (e^x - 1 - x)) for x >= 0 without overflowing e^x.
double log_j(double gamma, double x) {
    if (x < 600.0) return std::log1p(gamma * (std::expm1(x) - x));
    // e^x dominates: ln(gamma e^x) + ln(1 + (1 - gamma(1+x)) e^{-x}/gamma)
    return std::log(gamma) + x + std::log1p((1.0 - gamma * (1.0 + x)) * std::exp(-x) / gamma);
}

}  // namespace

std::string to_string(BoundMethod m) {
    switch (m) {
        case BoundMethod::Hoeffding: return "hoeffding";
        case BoundMethod::Bennett: return "bennett";
        case BoundMethod::Cantelli: return "cantelli";
        case BoundMethod::Bernstein: return "bernstein";
        case BoundMethod::Jebara: return "jebara";
        case BoundMethod::RefinedBennett: return "refined_bennett";
        case BoundMethod::Normal: return "normal";
    }
    return "?";
}

std::string BoundReport::csv_row() const {
    char buf[160];
    if (confidence_bound)
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.6g", to_string(method).c_str(),
                      log_prob_bound, *confidence_bound, wall_time);
    else
        std::snprintf(buf, sizeof buf, "%s,%.17g,,%.6g", to_string(method).c_str(),
                      log_prob_bound, wall_time);
    return buf;
}

double hoeffding_log_tail(const SumSpec& spec, double d) {
    require_deviation(d);
    if (!spec.has_two_sided_bounds())
        throw std::invalid_argument("hoeffding: every term needs a_lower");
    double denom = 0.0;
    for (const auto& t : spec.terms()) {
        const double w = t.b_upper - *t.a_lower;
        denom += w * w;
    }
    return clamp_log(-2.0 * d * d / denom);
}

double hoeffding_confidence(const SumSpec& spec, double tau) {
    require_level(tau, /*allow_one=*/true);
    if (!spec.has_two_sided_bounds())
        throw std::invalid_argument("hoeffding: every term needs a_lower");
    double denom = 0.0;
    for (const auto& t : spec.terms()) {
        const double w = t.b_upper - *t.a_lower;
        denom += w * w;
    }
    return std::sqrt(denom) * std::sqrt(-0.5 * std::log(tau));
}

double bennett_log_tail(const SumSpec& spec, double d) {
    require_deviation(d);
    const double s2 = spec.sigma_sq_total();
    if (!(s2 > 0.0)) throw std::domain_error("bennett: total variance must be > 0");
    const double b = spec.max_b();
    return clamp_log(-(s2 / (b * b)) * bennett_g(b * d / s2));
}

double bennett_confidence(const SumSpec& spec, double tau) {
    require_level(tau, /*allow_one=*/true);
    const double s2 = spec.sigma_sq_total();
    if (!(s2 > 0.0)) throw std::domain_error("bennett: total variance must be > 0");
    const double b = spec.max_b();
    return (s2 / b) * bennett_g_inv((b * b / s2) * std::log(1.0 / tau));
}

double cantelli_log_tail(const SumSpec& spec, double d) {
    require_deviation(d);
    const double s2 = spec.sigma_sq_total();
    return clamp_log(std::log(s2 / (s2 + d * d)));
}

double cantelli_confidence(const SumSpec& spec, double tau) {
    require_level(tau, /*allow_one=*/true);
    return std::sqrt(spec.sigma_sq_total()) * std::sqrt(1.0 / tau - 1.0);
}

double bernstein_log_tail(const SumSpec& spec, double d) {
    require_deviation(d);
    const double s2 = spec.sigma_sq_total();
    const double z = spec.max_b();
    const double denom = s2 + z * d / 3.0;
    if (denom == 0.0) return d == 0.0 ? 0.0 : -kInf;
    return clamp_log(-0.5 * d * d / denom);
}

double jebara_log_tail(const SumSpec& spec, double d) {
    require_deviation(d);
    if (d == 0.0) return 0.0;

    auto objective = [&](double t) {
        double acc = -t * d;
        for (const auto& tm : spec.terms()) {
            const double g = tm.gamma();
            if (g == 0.0) continue;  // deterministic term contributes ln(1)
            acc += log_j(g, t * tm.b_upper);
        }
        return acc;
    };

    // Bracket the minimum: grow until the objective has turned upward.
    double hi = 1.0;
    double f_hi = objective(hi);
    while (hi < 1e10) {
        const double f_next = objective(2.0 * hi);
        if (f_next > f_hi) break;
        hi *= 2.0;
        f_hi = f_next;
    }
    hi *= 2.0;

    // Coarse scan guards against flat/asymmetric shapes, then golden section.
    const int kScan = 256;
    int best = 0;
    double f_best = 0.0;  // t = 0 value
    for (int i = 1; i <= kScan; ++i) {
        const double f = objective(hi * i / kScan);
        if (f < f_best) {
            f_best = f;
            best = i;
        }
    }
    double lo = hi * std::max(0, best - 1) / kScan;
    double up = hi * std::min(kScan, best + 1) / kScan;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = up - invphi * (up - lo), x2 = lo + invphi * (up - lo);
    double f1 = objective(x1), f2 = objective(x2);
    while (up - lo > 1e-10) {
        if (f1 <= f2) {
            up = x2;
            x2 = x1;
            f2 = f1;
            x1 = up - invphi * (up - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (up - lo);
            f2 = objective(x2);
        }
    }
    return clamp_log(std::min({f_best, f1, f2}));
}

double normal_confidence(const SumSpec& spec, double tau) {
    require_level(tau, /*allow_one=*/false);
    return normal_quantile(1.0 - tau) * std::sqrt(spec.sigma_sq_total());
}

}  // namespace ccb
