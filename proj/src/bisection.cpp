#include "ccb/bisection.hpp"

#include <cmath>
#include <sstream>

#include "ccb/numeric.hpp"
#include "ccb/phi.hpp"

namespace ccb {

InfeasibleLevelError::InfeasibleLevelError(double b_bar, double tau, double tau_minus)
    : std::domain_error([&] {
          std::ostringstream os;
          os << "tau = " << tau << " <= tau^- = " << tau_minus
             << ": below tau^- only the trivial confidence bound b_bar = " << b_bar
             << " is certifiable";
          return os.str();
      }()),
      b_bar_(b_bar) {}

PhiStarResult phi_star(const SumSpec& spec, double alpha, double eps_t) {
    if (!(eps_t > 0.0)) throw std::invalid_argument("phi_star: eps_t must be > 0");
    if (!(alpha >= 0.0)) throw std::domain_error("phi_star: alpha must be >= 0");

    PhiStarResult res;
    res.eps_t = eps_t;
    const double b_bar = spec.b_bar();
    if (alpha > b_bar) {  // phi*_alpha = -inf beyond b_bar
        res.value = -kInf;
        res.t_hat = kInf;
        return res;
    }
    if (alpha == b_bar) {  // infimum reached only as t -> inf
        res.value = spec.log_tau_minus();
        res.t_hat = kInf;
        return res;
    }

    double t_lo = 0.0;
    double t_hi = -spec.log_tau_minus() / (static_cast<double>(spec.n()) * (b_bar - alpha));
    while (t_hi - t_lo > eps_t) {
        const double t_mid = 0.5 * (t_lo + t_hi);
        if (phi_d1(spec, alpha, t_mid) >= 0.0)
            t_hi = t_mid;
        else
            t_lo = t_mid;
        ++res.iterations;
    }
    res.t_hat = 0.5 * (t_lo + t_hi);
    res.value = phi(spec, alpha, res.t_hat);
    return res;
}

double alpha_upper_box(const SumSpec& spec, double tau) {
    if (!(tau <= 1.0)) throw std::domain_error("alpha_upper_box: tau must be <= 1");
    const double log_ratio = std::log(tau) - spec.log_tau_minus();  // ln(tau/tau^-)
    if (!(log_ratio > 0.0))
        throw InfeasibleLevelError(spec.b_bar(), tau, spec.tau_minus());
    const double box =
        spec.b_bar() - std::sqrt(log_ratio / (static_cast<double>(spec.n()) * spec.big_gamma()));
    return std::max(box, 0.0);
}

ConfidenceResult confidence_bound(const SumSpec& spec, double tau, double eps_t,
                                  double eps_alpha) {
    if (!(eps_t > 0.0) || !(eps_alpha > 0.0))
        throw std::invalid_argument("confidence_bound: tolerances must be > 0");

    ConfidenceResult res;
    res.eps_t = eps_t;
    res.eps_alpha = eps_alpha;

    double a_lo = 0.0;
    double a_hi = alpha_upper_box(spec, tau);  // raises below tau^-
    if (a_hi == 0.0) {
        // Box collapsed onto 0: phi*_0 = 0 >= ln(tau) always certifies 0.
        res.terminated_by = ConfidenceTermination::interval_alpha;
        return res;
    }

    const double band = spec.big_m() * eps_t * eps_t;
    const double log_tau = std::log(tau);
    double a_hat = 0.5 * (a_lo + a_hi);
    bool tol = false;
    while (a_hi - a_lo > eps_alpha && !tol) {
        a_hat = 0.5 * (a_lo + a_hi);
        const PhiStarResult inner = phi_star(spec, a_hat, eps_t);
        ++res.outer_iterations;
        res.total_inner_iterations += inner.iterations;
        res.max_inner_iterations = std::max(res.max_inner_iterations, inner.iterations);
        if (inner.value > log_tau + band)
            a_lo = a_hat;
        else if (inner.value < log_tau - band)
            a_hi = a_hat;
        else
            tol = true;
    }
    res.alpha_hat = a_hat;
    res.terminated_by =
        tol ? ConfidenceTermination::tolerance_phi : ConfidenceTermination::interval_alpha;
    return res;
}

int outer_iteration_bound(const SumSpec& spec, double eps_alpha) {
    return static_cast<int>(std::ceil(std::log2(spec.b_bar() / eps_alpha)));
}

int inner_iteration_bound(const SumSpec& spec, double tau, double eps_t) {
    const double log_ratio = std::log(tau) - spec.log_tau_minus();
    const double v = std::sqrt(spec.big_gamma()) * (-spec.log_tau_minus()) /
                     (eps_t * std::sqrt(static_cast<double>(spec.n()) * log_ratio));
    return static_cast<int>(std::ceil(std::log2(v)));
}

double alpha_error_bound(const SumSpec& spec, double eps_t, double eps_alpha) {
    const double m = spec.big_m();
    const double n = static_cast<double>(spec.n());
    const double e1 = std::sqrt(2.0 * m / (n * spec.min_m_k())) * eps_t;
    const double e2 = 2.0 * m / (n * spec.min_b_m_k()) * eps_t * eps_t;
    return std::max({eps_alpha, e1, e2});
}

}  // namespace ccb
