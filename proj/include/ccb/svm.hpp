#pragma once
// Distributionally robust soft-margin SVM.  The refined method replaces
// each chance constraint by the smooth convex surrogate built from the
// two-sided perspective function Psi (even extension of Psi+); the
// Cantelli method uses the classical SOCP surrogate (smoothed); the
// deterministic method is the plain soft-margin program.  All three are
// solved by a log-barrier interior scheme with analytic derivatives.

#include <array>
#include <string>
#include <vector>

namespace ccb {

struct SvmDataset {
    std::vector<std::vector<double>> points;  // M x N
    std::vector<int> labels;                  // {-1, +1}
    std::vector<std::vector<double>> sigmas;  // M x N, >= 0
    std::vector<std::vector<double>> bounds;  // M x N, > 0 (two-sided)
    std::vector<double> taus;                 // per-point error level in (0,1)
    double c_svm = 100.0;                     // slack penalty > 0

    int num_points() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
    void validate() const;

    // Per-class feature std-dev divided by 10; b = b_factor * sigma.
    // Features with zero class spread get sigma = 0 (deterministic).
    void calibrate_uncertainty(double b_factor = 5.0);

    // Subset view used for train/test splits.
    SvmDataset subset(const std::vector<int>& idx) const;
};

// CSV loader: one row per point, f1..fN then label in {-1, 1}.  A sidecar
// JSON (same path + ".json") may override sigmas/bounds/taus.
SvmDataset load_svm_csv(const std::string& path, double tau, double c_svm);

enum class SvmMethod { Refined, Cantelli, Deterministic };
std::string to_string(SvmMethod m);
SvmMethod svm_method_from_string(const std::string& s);

struct SvmSolution {
    std::vector<double> w;
    double w0 = 0.0;
    std::vector<double> xi;  // slacks, >= 0
    std::vector<double> z;   // auxiliary (Refined only), > 0
    double objective = 0.0;
    std::vector<double> residuals;  // per-constraint g_i, feasible iff <= 0
    bool converged = false;
    int newton_iterations = 0;
    double wall_time = 0.0;
};

// Two-sided Psi_{gamma,b}(y,z) = Psi+_{gamma,b}(y,z) for y >= 0 and
// Psi+_{1/gamma, b*gamma}(y,z) for y <= 0; C^2 across y = 0.
double psi(double gamma, double b, double y, double z);
std::array<double, 2> psi_grad(double gamma, double b, double y, double z);
std::array<double, 4> psi_hess(double gamma, double b, double y, double z);

struct SvmOptions {
    double barrier_reduction = 10.0;  // mu shrink factor per stage
    double duality_tol = 1e-8;        // stop when mu * #ineq <= this
    int max_newton = 2000;
    double z_min = 1e-9;
};

SvmSolution solve_svm(const SvmDataset& data, SvmMethod method, const SvmOptions& opt = {});

// Fraction of the test split classified consistently with its labels.
double svm_score(const SvmSolution& sol, const SvmDataset& test);

}  // namespace ccb
