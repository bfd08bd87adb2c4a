#include "ccb/mgf_chain.hpp"

#include <cmath>
#include <stdexcept>

namespace ccb {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::domain_error(what);
}

ChainCheck make_check(std::string name, double lhs, double rhs) {
    ChainCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.slack = (rhs - lhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    c.holds = c.slack >= -1e-12;
    return c;
}

}  // namespace

double est_D(double t, double gamma, double b) {
    require(t >= 0.0, "est_D: t must be >= 0");
    require(gamma > 0.0 && b > 0.0, "est_D: gamma and b must be > 0");
    return (gamma * std::exp(t * b) + std::exp(-t * gamma * b)) / (1.0 + gamma);
}

double est_J(double t, double gamma, double b) {
    require(t >= 0.0, "est_J: t must be >= 0");
    require(gamma >= 0.0 && b > 0.0, "est_J: gamma must be >= 0 and b > 0");
    return 1.0 + gamma * (std::expm1(t * b) - t * b);
}

double est_H(double t, double p) {
    require(t >= 0.0, "est_H: t must be >= 0");
    require(p >= 0.0 && p <= 1.0, "est_H: p must lie in [0,1]");
    return std::exp(t * p + t * t / 8.0);
}

double est_Z(double t, double p) {
    require(t >= 0.0, "est_Z: t must be >= 0");
    require(p >= 0.0 && p <= 1.0, "est_Z: p must lie in [0,1]");
    return 1.0 + p * std::expm1(t);
}

double est_Ck(double t, double p, double q, int k) {
    require(t >= 0.0, "est_Ck: t must be >= 0");
    require(k >= 1, "est_Ck: k must be >= 1");
    require(q >= 0.0 && q <= p && p <= 1.0, "est_Ck: need 0 <= q <= p <= 1");
    const double kk = static_cast<double>(k);
    return 1.0 + kk * std::expm1(t / kk) * (p - q) + q * std::expm1(t);
}

double est_Cinf(double t, double p, double q) {
    require(t >= 0.0, "est_Cinf: t must be >= 0");
    require(q >= 0.0 && q <= p && p <= 1.0, "est_Cinf: need 0 <= q <= p <= 1");
    return 1.0 + t * (p - q) + q * std::expm1(t);
}

std::vector<ChainCheck> check_chain(double t, double gamma, double b, double p) {
    require(t >= 0.0, "check_chain: t must be >= 0");
    require(gamma > 0.0 && b > 0.0, "check_chain: gamma and b must be > 0");
    require(p > 0.0 && p < 1.0, "check_chain: p must lie in (0,1)");

    std::vector<ChainCheck> out;
    out.push_back(make_check("D<=J", est_D(t, gamma, b), est_J(t, gamma, b)));
    if (gamma <= 1.0) {
        const double cosh_tb = std::cosh(t * b);  // = D(t, 1, b)
        out.push_back(make_check("D<=cosh", est_D(t, gamma, b), cosh_tb));
        out.push_back(make_check("cosh<=gauss", cosh_tb, std::exp(0.5 * t * b * t * b)));
    }
    out.push_back(make_check("Z<=H", est_Z(t, p), est_H(t, p)));

    // [0,1]-support parameterization: b01 = 1-p, sigma^2 = gamma b01^2.
    const double b01 = 1.0 - p;
    const double q = gamma * b01 * b01 + p * p;
    require(q <= p, "check_chain: q = sigma^2 + p^2 must not exceed p");
    out.push_back(make_check("Cinf<=Z", est_Cinf(t, p, q), est_Z(t, p)));
    out.push_back(make_check("J<=Cinf", est_J(t, gamma, b01), est_Cinf(t, p, q)));
    return out;
}

}  // namespace ccb
