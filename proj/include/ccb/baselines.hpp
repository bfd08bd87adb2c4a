#pragma once
// Comparison tail bounds for sums of independent bounded variables:
// Hoeffding, classical Bennett, Cantelli, a Bernstein-style bound, the
// Jebara-type bound (numeric Chernoff minimization), and the exact
// Gaussian quantile.  Log-tail functions take the deviation d of the sum
// and return a natural-log probability bound clamped to <= 0; confidence
// functions invert them at error level tau.

#include <optional>
#include <string>

#include "ccb/sum_spec.hpp"

namespace ccb {

enum class BoundMethod { Hoeffding, Bennett, Cantelli, Bernstein, Jebara, RefinedBennett, Normal };

std::string to_string(BoundMethod m);

struct BoundReport {
    BoundMethod method = BoundMethod::Hoeffding;
    double log_prob_bound = 0.0;  // <= 0, or -inf
    std::optional<double> confidence_bound;
    double wall_time = 0.0;  // seconds

    // One CSV row: method,log_bound,confidence,seconds
    std::string csv_row() const;
};

// -2 d^2 / sum (b_k - a_k)^2.  Requires a_lower on every term.
double hoeffding_log_tail(const SumSpec& spec, double d);
// d_tau = ||b - a||_2 sqrt(-ln sqrt(tau)), tau in (0,1].
double hoeffding_confidence(const SumSpec& spec, double tau);

// -(s2/b^2) g(b d / s2) with b = max_k b_k, s2 = sum sigma_k^2.
double bennett_log_tail(const SumSpec& spec, double d);
// d_tau = (s2/b) g^{-1}((b^2/s2) ln(1/tau)), tau in (0,1].
double bennett_confidence(const SumSpec& spec, double tau);

// ln(s2 / (s2 + d^2)) and sigma sqrt(1/tau - 1), the one-sided
// Chebyshev-Cantelli pair.
double cantelli_log_tail(const SumSpec& spec, double d);
double cantelli_confidence(const SumSpec& spec, double tau);

// -d^2 / (2 (sum sigma_k^2 + max_k b_k * d / 3)); assumes |X_k - mu_k| <= b_k.
double bernstein_log_tail(const SumSpec& spec, double d);

// inf_{t>=0} { -t d + sum_k ln(1 + gamma_k (e^{t b_k} - 1 - t b_k)) },
// minimized numerically (coarse scan + golden section, tolerance 1e-10 in t).
double jebara_log_tail(const SumSpec& spec, double d);

// Phi^{-1}(1 - tau) sqrt(sum sigma_k^2): the exact bound when every
// summand is Gaussian with the specified variance.  tau in (0,1).
double normal_confidence(const SumSpec& spec, double tau);

}  // namespace ccb
