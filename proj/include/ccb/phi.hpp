#pragma once
// The refined second-order Chernoff exponent for a heterogeneous sum,
//
//   phi_alpha(t) = ln(tau^-) + N t (b_bar - alpha)
//                  + sum_k ln(1 + gamma_k^{-1} e^{-t b_k (1+gamma_k)}),
//
// together with its first two t-derivatives.  exp(inf_{t>=0} phi_alpha(t))
// bounds P[sum_k X_k - E[X_k] >= alpha N].  All three are pure functions
// and safe to call concurrently.

#include "ccb/sum_spec.hpp"

namespace ccb {

double phi(const SumSpec& spec, double alpha, double t);

// d/dt phi = N(b_bar - alpha) - sum_k b_k(1+gamma_k) / (1 + gamma_k e^{t b_k(1+gamma_k)})
double phi_d1(const SumSpec& spec, double alpha, double t);

// d2/dt2 phi, a value in [0, M].
double phi_d2(const SumSpec& spec, double alpha, double t);

}  // namespace ccb
