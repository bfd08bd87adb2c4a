#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "ccb/mgf_chain.hpp"
#include "ccb/phi.hpp"
#include "ccb/rng.hpp"
#include "ccb/sum_spec.hpp"
#include "doctest.h"

using namespace ccb;

TEST_CASE("estimator point values") {
    CHECK(est_D(0.0, 0.3, 1.2) == doctest::Approx(1.0));
    CHECK(est_D(1.7, 1.0, 0.8) == doctest::Approx(std::cosh(1.7 * 0.8)).epsilon(1e-14));
    CHECK(est_D(2.0, 0.25, 1.0) == doctest::Approx(1.9630357475562368).epsilon(1e-14));

    CHECK(est_J(0.0, 0.5, 1.0) == doctest::Approx(1.0));
    CHECK(est_J(2.0, 0.0, 1.0) == doctest::Approx(1.0));  // gamma -> 0
    CHECK(est_J(1.3, 0.7, 0.9) == doctest::Approx(1.7363948469699499).epsilon(1e-14));

    CHECK(est_H(0.0, 0.4) == doctest::Approx(1.0));
    CHECK(est_H(2.0, 0.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));

    CHECK(est_Z(0.0, 0.4) == doctest::Approx(1.0));
    CHECK(est_Z(1.7, 1.0) == doctest::Approx(std::exp(1.7)).epsilon(1e-14));

    CHECK(est_Ck(0.0, 0.5, 0.3, 3) == doctest::Approx(1.0));
    CHECK(est_Cinf(0.0, 0.5, 0.3) == doctest::Approx(1.0));
    // p = q collapses C_inf onto Z.
    CHECK(est_Cinf(1.3, 0.4, 0.4) == doctest::Approx(est_Z(1.3, 0.4)).epsilon(1e-14));
}

TEST_CASE("C_k decreases in k") {
    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
        const double t = rng.uniform(0.0, 4.0);
        const double p = rng.uniform(0.05, 0.95);
        const double q = rng.uniform(p * p, p);
        double prev = est_Ck(t, p, q, 1);
        for (int k = 2; k <= 40; k += 3) {
            const double cur = est_Ck(t, p, q, k);
            CHECK(cur <= prev + 1e-12 * std::max(1.0, prev));
            prev = cur;
        }
        CHECK(est_Cinf(t, p, q) <= prev + 1e-12 * std::max(1.0, prev));
    }
}

TEST_CASE("check_chain at the trivial point t = 0") {
    const auto checks = check_chain(0.0, 0.5, 0.8, 0.4);
    for (const auto& c : checks) {
        CHECK(c.holds);
        CHECK(c.slack == doctest::Approx(0.0).epsilon(1e-14));  // all estimators equal 1
    }
}

TEST_CASE("check_chain names and gamma = 1 edge") {
    const auto checks = check_chain(1.2, 1.0, 0.7, 0.6);
    REQUIRE(checks.size() == 6);
    CHECK(checks[0].name == "D<=J");
    CHECK(checks[1].name == "D<=cosh");
    CHECK(checks[2].name == "cosh<=gauss");
    CHECK(checks[3].name == "Z<=H");
    CHECK(checks[4].name == "Cinf<=Z");
    CHECK(checks[5].name == "J<=Cinf");
    for (const auto& c : checks) CHECK(c.holds);
    // gamma = 1: D equals cosh exactly.
    CHECK(checks[1].slack == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("dominance chain holds on 10^4 random in-domain samples") {
    Rng rng(13);
    int samples = 0;
    while (samples < 10000) {
        const double t = rng.uniform(0.0, 5.0);
        const double p = rng.uniform(0.05, 0.95);
        const double gamma_cap = std::min(1.0, p / (1.0 - p));
        const double gamma = rng.uniform(1e-6, gamma_cap);
        const double b = rng.uniform(0.1, 2.0);
        for (const auto& c : check_chain(t, gamma, b, p)) {
            INFO(c.name, " slack=", c.slack, " t=", t, " gamma=", gamma, " b=", b, " p=", p);
            CHECK(c.slack >= -1e-12);
        }
        ++samples;
    }
}

TEST_CASE("est_D reconstructs the per-term phi factor") {
    Rng rng(47);
    for (int i = 0; i < 300; ++i) {
        const double b = rng.uniform(0.05, 1.5);
        const double gamma = rng.uniform(0.01, 4.0);
        const double t = rng.uniform(0.0, 8.0);
        RandomTermSpec term;
        term.mean = 0.0;
        term.sigma = std::sqrt(gamma) * b;
        term.b_upper = b;
        const SumSpec one({term});
        const double via_phi = std::exp(phi(one, 0.0, t));  // alpha = 0: pure term factor
        const double direct = est_D(t, gamma, b);
        CHECK(via_phi == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(est_D(-0.1, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(est_D(1.0, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(est_H(1.0, 1.5), std::domain_error);
    CHECK_THROWS_AS(est_Ck(1.0, 0.5, 0.7, 3), std::domain_error);  // q > p
    CHECK_THROWS_AS(est_Ck(1.0, 0.5, 0.3, 0), std::domain_error);
    CHECK_THROWS_AS(check_chain(1.0, 3.0, 1.0, 0.5), std::domain_error);  // q > p
}
