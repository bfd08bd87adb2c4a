#pragma once
// Upper estimators of the moment-generating function E[e^{tX}] for a
// centered variable under various moment assumptions, and the pairwise
// dominance comparisons between them as checkable numeric inequalities.

#include <string>
#include <vector>

namespace ccb {

// (gamma e^{tb} + e^{-t gamma b}) / (1 + gamma): the tight second-order
// estimator (exact for a two-point distribution).
double est_D(double t, double gamma, double b);

// 1 + gamma (e^{tb} - 1 - tb).
double est_J(double t, double gamma, double b);

// e^{tp + t^2/8}, for X in [0,1] with mean p (uncentered form).
double est_H(double t, double p);

// 1 + p(e^t - 1), exact for a Bernoulli(p).
double est_Z(double t, double p);

// 1 + k(e^{t/k} - 1)(p - q) + q(e^t - 1), with q = sigma^2 + p^2 <= p.
double est_Ck(double t, double p, double q, int k);

// Limit of est_Ck as k -> inf: 1 + t(p - q) + q(e^t - 1).
double est_Cinf(double t, double p, double q);

struct ChainCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // (rhs - lhs) / max(1, |lhs|, |rhs|)
    bool holds = false;  // slack >= -1e-12
};

// Evaluates the dominance chain at one parameter point.  (gamma, b) feed
// the second-order comparisons; the [0,1]-support comparisons use p with
// b = 1 - p and sigma^2 = gamma (1-p)^2, which requires q <= p.
// Out-of-domain parameters raise std::domain_error.
std::vector<ChainCheck> check_chain(double t, double gamma, double b, double p);

}  // namespace ccb
