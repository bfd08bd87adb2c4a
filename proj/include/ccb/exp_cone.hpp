#pragma once
// Exponential-cone encoding of sum-of-Psi constraints, used to
// cross-validate the direct nonlinear forms.  A constraint
// sum_k Psi_{gamma_k,b_k}(y_k, z) <= u expands, per k, into one linear
// row gamma_k eta_k + nu_k <= (1+gamma_k) z and two memberships
// (eta_k, z, y_k b_k - v_k), (nu_k, z, -y_k b_k gamma_k - v_k) in
// K_exp = {(x1,x2,x3) : x1 >= x2 e^{x3/x2}, x2 > 0}, plus the aggregate
// row sum_k v_k <= u.  This module decides feasibility analytically
// (cone-tight eta, nu at optimal v); it is a checker, not a solver.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ccb {

// Affine expression over the auxiliary variables of the system.
struct AffineExpr {
    double constant = 0.0;
    std::map<int, double> terms;  // variable index -> coefficient
};

struct ExpConeSystem {
    std::vector<std::string> var_names;            // eta_k, nu_k, v_k
    std::vector<std::array<AffineExpr, 3>> cones;  // (x1,x2,x3) in K_exp
    struct Row {
        AffineExpr lhs;  // lhs <= rhs
        double rhs = 0.0;
    };
    std::vector<Row> rows;

    // Documented JSON schema (docs/exp_cone_schema.md).
    std::string to_json() const;

    // Analytic feasibility: eta_k, nu_k at their cone-tight values, v_k
    // at the minimum permitted by its two cones and linear row.
    bool feasible(double tol = 0.0) const;
};

// Builds the system for sum_k Psi_{gamma_k,b_k}(y_k, z) <= u; per k the
// branch of the two-Psi+ maximum matching sign(y_k) is emitted.
// Requires z > 0.
ExpConeSystem expand_psi_constraint(const std::vector<std::pair<double, double>>& gamma_b,
                                    const std::vector<double>& y, double z, double u);

// Samples random (y, z, u) and returns the fraction of samples where
// cone-system feasibility matches the direct sum Psi <= u test.  Samples
// inside the boundary band |sum Psi - u| <= 1e-9 are skipped as ties.
double check_equivalence(const std::vector<std::pair<double, double>>& gamma_b, int samples,
                         std::uint64_t seed);

}  // namespace ccb
