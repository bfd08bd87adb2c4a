#pragma once
// Chance-constrained binary knapsack: the deterministic problem, four
// classical conservative approximations (normal, Hoeffding, Cantelli,
// Bernstein/SOCP) and the refined formulation built on the perspective
// function Psi+ of the tight second-order MGF estimator.  All stochastic
// formulations are solved by outer approximation: a MILP master grows
// gradient cuts lazily at integer nodes.

#include <array>
#include <string>
#include <vector>

#include "ccb/milp.hpp"
#include "ccb/sum_spec.hpp"

namespace ccb {

struct KnapsackInstance {
    std::vector<double> profits;       // > 0
    std::vector<double> mean_weights;  // > 0
    std::vector<double> sigmas;        // >= 0
    std::vector<double> b_upper;       // > 0; two-sided |w - mean| <= b assumed
    double capacity = 0.0;             // > 0
    double tau = 0.03;                 // error level in (0,1)

    int n() const { return static_cast<int>(profits.size()); }
    double gamma(int k) const {
        const double r = sigmas[static_cast<size_t>(k)] / b_upper[static_cast<size_t>(k)];
        return r * r;
    }
    void validate() const;

    std::string to_json() const;
    static KnapsackInstance from_json(const std::string& text);

    // Reads "N C" then N lines "profit weight" and applies the adaptation
    // sigma = sigma_fraction * weight (or U(0, fraction*weight] when
    // randomized, seeded), b = b_factor * sigma.
    struct AdaptOptions {
        double sigma_fraction = 0.05;
        double b_factor = 5.0;
        double tau = 0.03;
        bool randomized = false;
        std::uint64_t seed = 1;
    };
    static KnapsackInstance from_text(const std::string& text, const AdaptOptions& opt);
    static KnapsackInstance from_text(const std::string& text);  // default adaptation

    // Moment spec of the items selected by y (for tail certificates).
    SumSpec selected_spec(const std::vector<int>& y) const;
};

enum class CkpFormulation { KP, N, H, C, B, Refined };

std::string to_string(CkpFormulation f);
CkpFormulation ckp_formulation_from_string(const std::string& s);

struct KnapsackSolution {
    std::vector<int> y;
    double z = 0.0;  // auxiliary variable (Refined / B only)
    double objective = 0.0;
    CkpFormulation formulation = CkpFormulation::KP;
    SolveStatus status = SolveStatus::infeasible;
    double certificate = 0.0;  // constraint value at (y,z); feasible iff <= 0
    long cuts_added = 0;
    long nodes = 0;
    double wall_time = 0.0;
};

// Perspective function Psi+_{gamma,b}(y,z) = z ln((gamma e^{yb/z} +
// e^{-yb gamma/z})/(1+gamma)); jointly convex, positively homogeneous of
// degree 1, closed at z=0 by its recession function.
double psi_plus(double gamma, double b, double y, double z);
std::array<double, 2> psi_plus_grad(double gamma, double b, double y, double z);   // (d/dy, d/dz)
std::array<double, 4> psi_plus_hess(double gamma, double b, double y, double z);   // row-major 2x2

struct CkpOptions {
    double mip_gap = 1e-5;
    double time_limit = 1e30;
    double cut_violation = 1e-7;  // lazy-cut trigger threshold
};

KnapsackSolution solve_ckp(const KnapsackInstance& inst, CkpFormulation f,
                           const CkpOptions& options = {});

// Constraint value of formulation f at (y, z); <= 0 iff feasible.  For the
// refined formulation this is the post-division form
// mean^T y + sum Psi+ - C - z ln(tau).
double ckp_constraint_value(const KnapsackInstance& inst, CkpFormulation f,
                            const std::vector<int>& y, double z);

// ln of the refined tail certificate P[w^T y >= C] at selection y.
double refined_log_prob(const KnapsackInstance& inst, const std::vector<int>& y,
                        double eps_t = 1e-8);

// Do the exponential form and the SOCP form of the Bernstein constraint
// agree in feasibility at (y, z)?  Requires z >= max_k b_k y_k.
bool ckp_b_socp_equivalence(const KnapsackInstance& inst, const std::vector<int>& y, double z);

// Safe master upper bound for z: C/(-ln tau) + sum b_k.
double ckp_z_upper(const KnapsackInstance& inst);

}  // namespace ccb
