#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "ccb/baselines.hpp"
#include "ccb/bench.hpp"
#include "ccb/bisection.hpp"
#include "ccb/numeric.hpp"
#include "ccb/phi.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ccb;

namespace {

SumSpec homogeneous(int n, double sigma, double b) {
    RandomTermSpec t;
    t.mean = 0.1;
    t.sigma = sigma;
    t.b_upper = b;
    return SumSpec(std::vector<RandomTermSpec>(static_cast<size_t>(n), t));
}

// Deterministic feasible Table-1 draw with tau^- safely below tau.
Table1Draw feasible_draw(Rng& rng, int n, double tau) {
    for (;;) {
        Table1Draw d = gen_table1_spec(rng, n);
        if (d.spec.tau_minus() < 0.5 * tau) return d;
    }
}

}  // namespace

TEST_CASE("phi_star sentinels and domain") {
    const SumSpec s = homogeneous(3, 0.4, 0.9);
    const auto at_bbar = phi_star(s, s.b_bar(), 1e-6);
    CHECK(at_bbar.value == doctest::Approx(s.log_tau_minus()).epsilon(1e-13));
    CHECK(std::isinf(at_bbar.t_hat));
    CHECK(at_bbar.iterations == 0);

    const auto beyond = phi_star(s, s.b_bar() + 0.1, 1e-6);
    CHECK(beyond.value == -kInf);
    CHECK(beyond.iterations == 0);

    CHECK_THROWS_AS(phi_star(s, -0.01, 1e-6), std::domain_error);
    CHECK_THROWS_AS(phi_star(s, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("phi_star at alpha = 0 returns ~0 from the t = 0 side") {
    const SumSpec s = homogeneous(5, 0.3, 0.8);
    const auto res = phi_star(s, 0.0, 1e-6);
    CHECK(std::abs(res.value) <= s.big_m() * 1e-12 + 1e-12);
    CHECK(res.t_hat <= 1e-6);
}

TEST_CASE("phi_star matches the dense-grid oracle") {
    const SumSpec s = homogeneous(10, 0.5, 1.0);
    const auto res = phi_star(s, 0.3, 1e-8);
    const auto grid = oracle::grid_phi_star(s, 0.3);
    CHECK(std::abs(res.value - static_cast<double>(grid.value)) <= 1e-10);

    Rng rng(7);
    for (int i = 0; i < 40; ++i) {
        const auto draw = feasible_draw(rng, 1 + static_cast<int>(rng.uniform_int(8)), 1.0);
        const double eps_t = 1e-6;
        const auto r = phi_star(draw.spec, draw.alpha, eps_t);
        const double exact = static_cast<double>(oracle::grid_phi_star(draw.spec, draw.alpha).value);
        CHECK(std::abs(r.value - exact) <= draw.spec.big_m() * eps_t * eps_t + 1e-12);
        CHECK(r.value >= exact - 1e-12);  // an approximate minimum cannot undershoot
    }
}

TEST_CASE("alpha_upper_box behavior") {
    const SumSpec s = homogeneous(4, 0.45, 0.9);
    // tau -> tau^- pushes the box to b_bar.
    const double near = s.tau_minus() * (1.0 + 1e-12);
    CHECK(alpha_upper_box(s, near) == doctest::Approx(s.b_bar()).epsilon(1e-5));
    CHECK_THROWS_AS(alpha_upper_box(s, s.tau_minus()), InfeasibleLevelError);
    CHECK_THROWS_AS(alpha_upper_box(s, 1.5), std::domain_error);

    // Tiny b with moderate Gamma: the box clamps to zero and the search
    // certifies alpha = 0 immediately.
    const SumSpec small_b = homogeneous(1, 0.005, 0.01);
    CHECK(alpha_upper_box(small_b, 0.5) == 0.0);
    const auto res = confidence_bound(small_b, 0.5);
    CHECK(res.alpha_hat == 0.0);
    CHECK(res.outer_iterations == 0);
}

TEST_CASE("confidence_bound at tau = 1 certifies ~0") {
    const SumSpec s = homogeneous(6, 0.35, 0.7);
    const auto res = confidence_bound(s, 1.0, 1e-9, 1e-6);
    CHECK(res.alpha_hat <= alpha_error_bound(s, 1e-9, 1e-6) + 1e-12);
}

TEST_CASE("confidence_bound against the grid inversion oracle") {
    Rng rng(19);
    for (int i = 0; i < 12; ++i) {
        const auto draw = feasible_draw(rng, 3, 0.1);
        const auto res = confidence_bound(draw.spec, 0.1, 1e-6, 1e-6);
        const double exact = oracle::grid_alpha_tau(draw.spec, 0.1);
        const double bound = alpha_error_bound(draw.spec, 1e-6, 1e-6);
        INFO("alpha_hat=", res.alpha_hat, " exact=", exact, " bound=", bound);
        CHECK(std::abs(res.alpha_hat - exact) <= bound + 1e-9);
    }
}

TEST_CASE("tolerance_phi termination certifies phi* within 2 M eps_t^2") {
    Rng rng(23);
    int tol_hits = 0;
    for (int i = 0; i < 30; ++i) {
        const auto draw = feasible_draw(rng, 5, 0.03);
        const auto res = confidence_bound(draw.spec, 0.03, 1e-4, 1e-12);
        if (res.terminated_by != ConfidenceTermination::tolerance_phi) continue;
        ++tol_hits;
        const double m = draw.spec.big_m();
        const double star =
            static_cast<double>(oracle::grid_phi_star(draw.spec, res.alpha_hat).value);
        CHECK(std::abs(star - std::log(0.03)) <= 2.0 * m * 1e-4 * 1e-4 + 1e-12);
    }
    CHECK(tol_hits > 0);  // the loose eps_t forces the band exit on most runs
}

TEST_CASE("iteration counts respect the theorem bounds") {
    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
        const auto draw = feasible_draw(rng, 1 + static_cast<int>(rng.uniform_int(12)), 0.03);
        const auto res = confidence_bound(draw.spec, 0.03, 1e-6, 1e-6);
        CHECK(res.outer_iterations <= outer_iteration_bound(draw.spec, 1e-6));
        CHECK(res.max_inner_iterations <= inner_iteration_bound(draw.spec, 0.03, 1e-6));
        CHECK(res.alpha_hat <= alpha_upper_box(draw.spec, 0.03) + 1e-15);
    }
}

TEST_CASE("monotonicity of the confidence bound in tau") {
    Rng rng(37);
    for (int i = 0; i < 15; ++i) {
        const auto draw = feasible_draw(rng, 8, 0.2);
        const double slack = alpha_error_bound(draw.spec, 1e-6, 1e-6);
        double prev = kInf;
        for (double tau : {0.01, 0.05, 0.2, 0.6}) {
            if (!(tau > draw.spec.tau_minus())) continue;
            const double a = confidence_bound(draw.spec, tau).alpha_hat;
            CHECK(a <= prev + 2.0 * slack);
            prev = a;
        }
    }
}

TEST_CASE("phi* is locally Lipschitz from below (gap lemma)") {
    Rng rng(41);
    for (int i = 0; i < 10; ++i) {
        const auto draw = feasible_draw(rng, 3, 1.0);
        const double b_bar = draw.spec.b_bar();
        const double a1 = rng.uniform(0.05 * b_bar, 0.45 * b_bar);
        const double a2 = rng.uniform(0.55 * b_bar, 0.95 * b_bar);
        const auto g1 = oracle::grid_phi_star(draw.spec, a1);
        const auto g2 = oracle::grid_phi_star(draw.spec, a2);
        const double lhs = std::abs(static_cast<double>(g2.value - g1.value));
        const double rhs = draw.spec.n() *
                           std::min(static_cast<double>(g1.t), static_cast<double>(g2.t)) *
                           std::abs(a2 - a1);
        CHECK(lhs >= rhs - 1e-9);
    }
}

TEST_CASE("infeasible levels raise with the trivial bound attached") {
    const SumSpec s = homogeneous(2, 0.9, 1.0);  // gamma = 0.81, tau^- ~ 0.2
    const double tau_minus = s.tau_minus();
    try {
        confidence_bound(s, 0.5 * tau_minus);
        FAIL("expected InfeasibleLevelError");
    } catch (const InfeasibleLevelError& e) {
        CHECK(e.certified_bound() == doctest::Approx(s.b_bar()));
    }
    CHECK_THROWS_AS(confidence_bound(s, 1.0 + 1e-9), std::domain_error);
    CHECK_THROWS_AS(confidence_bound(s, 0.1, -1.0, 1e-6), std::invalid_argument);
}

TEST_CASE("confidence bound stays above the exact normal bound") {
    Rng rng(43);
    for (int i = 0; i < 25; ++i) {
        const auto draw = feasible_draw(rng, 10, 0.05);
        const double refined = confidence_bound(draw.spec, 0.05).alpha_hat * draw.spec.n();
        CHECK(refined / normal_confidence(draw.spec, 0.05) >= 1.0 - 1e-9);
    }
}
