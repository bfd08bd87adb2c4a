#pragma once
// Certified bisection searches on the refined tail exponent.
//
// phi_star bisects d/dt phi over [0, -ln(tau^-)/(N(b_bar - alpha))] and
// certifies |value - phi*_alpha| <= M eps_t^2.  confidence_bound nests it
// inside an outer bisection on alpha: the interval is halved only while
// the inner estimate stays outside the band ln(tau) +/- M eps_t^2, so the
// search terminates either by entering the band (tolerance_phi) or by
// exhausting the alpha interval (interval_alpha).

#include <stdexcept>

#include "ccb/sum_spec.hpp"

namespace ccb {

struct PhiStarResult {
    double value = 0.0;  // |value - phi*_alpha| <= M eps_t^2
    double t_hat = 0.0;  // midpoint of the final bracket
    int iterations = 0;
    double eps_t = 0.0;
};

enum class ConfidenceTermination { tolerance_phi, interval_alpha };

struct ConfidenceResult {
    double alpha_hat = 0.0;  // the sum deviates < alpha_hat * N w.p. >= 1 - tau
    int outer_iterations = 0;
    long total_inner_iterations = 0;
    int max_inner_iterations = 0;  // largest single inner call
    ConfidenceTermination terminated_by = ConfidenceTermination::interval_alpha;
    double eps_t = 0.0;
    double eps_alpha = 0.0;
};

// Raised for tau <= tau^-: below tau^- only the trivial bound b_bar can be
// certified.
class InfeasibleLevelError : public std::domain_error {
public:
    InfeasibleLevelError(double b_bar, double tau, double tau_minus);
    double certified_bound() const { return b_bar_; }

private:
    double b_bar_;
};

// inf_t phi_alpha(t) for 0 <= alpha.  alpha = b_bar returns the limit
// (ln tau^-, t_hat = +inf); alpha > b_bar returns the -inf sentinel; both
// with zero iterations.  alpha < 0 raises std::domain_error.
PhiStarResult phi_star(const SumSpec& spec, double alpha, double eps_t = 1e-6);

// The unique alpha with phi*_alpha = ln(tau), for tau in (tau^-, 1].
ConfidenceResult confidence_bound(const SumSpec& spec, double tau,
                                  double eps_t = 1e-6, double eps_alpha = 1e-6);

// Initialization box b_bar - sqrt(ln(tau/tau^-)/(N Gamma)), clamped at 0.
double alpha_upper_box(const SumSpec& spec, double tau);

// A-priori guarantees from the termination theorem.
int outer_iteration_bound(const SumSpec& spec, double eps_alpha);
int inner_iteration_bound(const SumSpec& spec, double tau, double eps_t);
double alpha_error_bound(const SumSpec& spec, double eps_t, double eps_alpha);

}  // namespace ccb
