#include "ccb/knapsack.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ccb/bisection.hpp"
#include "ccb/numeric.hpp"
#include "ccb/rng.hpp"
#include "json.hpp"

namespace ccb {

namespace {

void require_params(double gamma, double b) {
    if (!(gamma > 0.0)) throw std::domain_error("psi_plus: gamma must be > 0");
    if (!(b > 0.0)) throw std::domain_error("psi_plus: b must be > 0");
}

}  // namespace

double psi_plus(double gamma, double b, double y, double z) {
    require_params(gamma, b);
    if (!(z >= 0.0)) throw std::domain_error("psi_plus: z must be >= 0");
    if (z == 0.0) return y >= 0.0 ? b * y : -b * gamma * y;  // recession function
    const double log_g = std::log(gamma);
    const double u = (y / z) * b * (1.0 + gamma);
    return y * b - z * softplus(-log_g) + z * softplus(-u - log_g);
}

std::array<double, 2> psi_plus_grad(double gamma, double b, double y, double z) {
    require_params(gamma, b);
    if (!(z >= 0.0)) throw std::domain_error("psi_plus_grad: z must be >= 0");
    if (z == 0.0) {
        // Limiting subgradients of the recession branches.
        if (y > 0.0) return {b, -softplus(-std::log(gamma))};
        if (y < 0.0) return {-b * gamma, -std::log1p(gamma)};
        return {0.0, 0.0};
    }
    const double log_g = std::log(gamma);
    const double d = b * (1.0 + gamma);
    const double u = (y / z) * d;
    const double s = logistic(-u - log_g);  // 1 / (1 + gamma e^u)
    const double dy = b - d * s;
    const double dz = softplus(-u - log_g) - softplus(-log_g) + (d * y / z) * s;
    return {dy, dz};
}

std::array<double, 4> psi_plus_hess(double gamma, double b, double y, double z) {
    require_params(gamma, b);
    if (!(z > 0.0)) throw std::domain_error("psi_plus_hess: z must be > 0");
    const double log_g = std::log(gamma);
    const double d = b * (1.0 + gamma);
    const double u = (y / z) * d;
    const double s = logistic(-u - log_g);
    const double c = d * d * s * (1.0 - s);  // gamma e^u (d/(1+gamma e^u))^2
    return {c / z, -c * y / (z * z), -c * y / (z * z), c * y * y / (z * z * z)};
}

void KnapsackInstance::validate() const {
    const size_t N = profits.size();
    if (N == 0) throw std::invalid_argument("KnapsackInstance: empty");
    if (mean_weights.size() != N || sigmas.size() != N || b_upper.size() != N)
        throw std::invalid_argument("KnapsackInstance: field length mismatch");
    for (size_t k = 0; k < N; ++k) {
        if (!(profits[k] > 0.0) || !(mean_weights[k] > 0.0))
            throw std::invalid_argument("KnapsackInstance: profits and weights must be > 0");
        if (!(sigmas[k] >= 0.0) || !(b_upper[k] > 0.0))
            throw std::invalid_argument("KnapsackInstance: need sigma >= 0 and b > 0");
    }
    if (!(capacity > 0.0)) throw std::invalid_argument("KnapsackInstance: capacity must be > 0");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("KnapsackInstance: tau in (0,1)");
}

std::string KnapsackInstance::to_json() const {
    nlohmann::json doc = {{"profits", profits},   {"mean_weights", mean_weights},
                          {"sigmas", sigmas},     {"b", b_upper},
                          {"capacity", capacity}, {"tau", tau}};
    return doc.dump();
}

KnapsackInstance KnapsackInstance::from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    KnapsackInstance inst;
    inst.profits = doc.at("profits").get<std::vector<double>>();
    inst.mean_weights = doc.at("mean_weights").get<std::vector<double>>();
    inst.sigmas = doc.at("sigmas").get<std::vector<double>>();
    inst.b_upper = doc.at("b").get<std::vector<double>>();
    inst.capacity = doc.at("capacity").get<double>();
    inst.tau = doc.at("tau").get<double>();
    inst.validate();
    return inst;
}

KnapsackInstance KnapsackInstance::from_text(const std::string& text) {
    return from_text(text, AdaptOptions());
}

KnapsackInstance KnapsackInstance::from_text(const std::string& text, const AdaptOptions& opt) {
    std::istringstream is(text);
    int n = 0;
    double cap = 0.0;
    if (!(is >> n >> cap)) throw std::invalid_argument("knapsack text: expected \"N C\" header");
    KnapsackInstance inst;
    inst.capacity = cap;
    inst.tau = opt.tau;
    Rng rng(opt.seed);
    for (int k = 0; k < n; ++k) {
        double p = 0.0, w = 0.0;
        if (!(is >> p >> w)) throw std::invalid_argument("knapsack text: truncated item list");
        inst.profits.push_back(p);
        inst.mean_weights.push_back(w);
        const double frac =
            opt.randomized ? opt.sigma_fraction * (1.0 - rng.uniform()) : opt.sigma_fraction;
        inst.sigmas.push_back(frac * w);
        inst.b_upper.push_back(opt.b_factor * frac * w);
    }
    inst.validate();
    return inst;
}

SumSpec KnapsackInstance::selected_spec(const std::vector<int>& y) const {
    std::vector<RandomTermSpec> terms;
    for (int k = 0; k < n(); ++k) {
        if (!y[static_cast<size_t>(k)]) continue;
        RandomTermSpec t;
        t.mean = mean_weights[static_cast<size_t>(k)];
        t.sigma = sigmas[static_cast<size_t>(k)];
        t.b_upper = b_upper[static_cast<size_t>(k)];
        t.a_lower = -b_upper[static_cast<size_t>(k)];  // two-sided weight bound
        terms.push_back(t);
    }
    if (terms.empty()) throw std::invalid_argument("selected_spec: empty selection");
    return SumSpec(std::move(terms));
}

std::string to_string(CkpFormulation f) {
    switch (f) {
        case CkpFormulation::KP: return "kp";
        case CkpFormulation::N: return "normal";
        case CkpFormulation::H: return "hoeffding";
        case CkpFormulation::C: return "cantelli";
        case CkpFormulation::B: return "bernstein";
        case CkpFormulation::Refined: return "refined";
    }
    return "?";
}

CkpFormulation ckp_formulation_from_string(const std::string& s) {
    if (s == "kp") return CkpFormulation::KP;
    if (s == "normal") return CkpFormulation::N;
    if (s == "hoeffding") return CkpFormulation::H;
    if (s == "cantelli") return CkpFormulation::C;
    if (s == "bernstein") return CkpFormulation::B;
    if (s == "refined") return CkpFormulation::Refined;
    throw std::invalid_argument("unknown knapsack formulation: " + s);
}

double ckp_z_upper(const KnapsackInstance& inst) {
    double sum_b = 0.0;
    for (double b : inst.b_upper) sum_b += b;
    return inst.capacity / (-std::log(inst.tau)) + sum_b;
}

namespace {

// kappa * sqrt(y^T Q y) coefficient per sqrt-formulation; Q is diagonal.
double sqrt_kappa(const KnapsackInstance& inst, CkpFormulation f) {
    switch (f) {
        case CkpFormulation::N: {
            if (inst.tau >= 0.5)
                throw std::domain_error("CKP-N needs tau < 1/2 for a convex constraint");
            return normal_quantile(1.0 - inst.tau);
        }
        case CkpFormulation::H: return std::sqrt(2.0 * std::log(1.0 / inst.tau));
        case CkpFormulation::C: return std::sqrt(1.0 / inst.tau - 1.0);
        default: throw std::logic_error("sqrt_kappa: not a sqrt formulation");
    }
}

double sqrt_q(const KnapsackInstance& inst, CkpFormulation f, int k) {
    const double s = f == CkpFormulation::H ? inst.b_upper[static_cast<size_t>(k)]
                                            : inst.sigmas[static_cast<size_t>(k)];
    return s * s;
}

double dot_means(const KnapsackInstance& inst, const std::vector<int>& y) {
    double v = 0.0;
    for (int k = 0; k < inst.n(); ++k)
        if (y[static_cast<size_t>(k)]) v += inst.mean_weights[static_cast<size_t>(k)];
    return v;
}

}  // namespace

double ckp_constraint_value(const KnapsackInstance& inst, CkpFormulation f,
                            const std::vector<int>& y, double z) {
    const double wy = dot_means(inst, y);
    switch (f) {
        case CkpFormulation::KP: return wy - inst.capacity;
        case CkpFormulation::N:
        case CkpFormulation::H:
        case CkpFormulation::C: {
            double q = 0.0;
            for (int k = 0; k < inst.n(); ++k)
                if (y[static_cast<size_t>(k)]) q += sqrt_q(inst, f, k);
            return sqrt_kappa(inst, f) * std::sqrt(q) + wy - inst.capacity;
        }
        case CkpFormulation::B: {
            const double L = std::log(1.0 / inst.tau);
            double q = L * L * z * z / 9.0;
            for (int k = 0; k < inst.n(); ++k)
                if (y[static_cast<size_t>(k)]) {
                    const double s = inst.sigmas[static_cast<size_t>(k)];
                    q += 2.0 * L * s * s;
                }
            return L * z / 3.0 + std::sqrt(q) + wy - inst.capacity;
        }
        case CkpFormulation::Refined: {
            double acc = wy - inst.capacity - z * std::log(inst.tau);
            for (int k = 0; k < inst.n(); ++k) {
                if (!y[static_cast<size_t>(k)]) continue;
                const double g = inst.gamma(k);
                if (g == 0.0) continue;  // deterministic weight, zero deviation
                acc += psi_plus(g, inst.b_upper[static_cast<size_t>(k)], 1.0, z);
            }
            return acc;
        }
    }
    return 0.0;
}

double refined_log_prob(const KnapsackInstance& inst, const std::vector<int>& y, double eps_t) {
    const double d = inst.capacity - dot_means(inst, y);
    if (d <= 0.0) return 0.0;  // cannot certify anything below the mean load
    std::vector<RandomTermSpec> terms;
    for (int k = 0; k < inst.n(); ++k) {
        if (!y[static_cast<size_t>(k)] || inst.sigmas[static_cast<size_t>(k)] == 0.0) continue;
        RandomTermSpec t;
        t.mean = inst.mean_weights[static_cast<size_t>(k)];
        t.sigma = inst.sigmas[static_cast<size_t>(k)];
        t.b_upper = inst.b_upper[static_cast<size_t>(k)];
        terms.push_back(t);
    }
    if (terms.empty()) return -kInf;  // deterministic load strictly below capacity
    const SumSpec spec{std::move(terms)};
    const double alpha = d / static_cast<double>(spec.n());
    return phi_star(spec, alpha, eps_t).value;
}

bool ckp_b_socp_equivalence(const KnapsackInstance& inst, const std::vector<int>& y, double z) {
    const double log_tau = std::log(inst.tau);
    const double d = inst.capacity - dot_means(inst, y);
    double s2 = 0.0;
    for (int k = 0; k < inst.n(); ++k)
        if (y[static_cast<size_t>(k)]) {
            const double s = inst.sigmas[static_cast<size_t>(k)];
            s2 += s * s;
        }

    bool exp_feasible;
    if (d <= 0.0) {
        exp_feasible = false;
    } else {
        const double denom = s2 + z * d / 3.0;
        exp_feasible = denom == 0.0 ? true : -0.5 * d * d / denom <= log_tau;
    }
    const bool socp_feasible = ckp_constraint_value(inst, CkpFormulation::B, y, z) <= 0.0;
    return exp_feasible == socp_feasible;
}

KnapsackSolution solve_ckp(const KnapsackInstance& inst, CkpFormulation f,
                           const CkpOptions& options) {
    inst.validate();
    const auto t0 = std::chrono::steady_clock::now();

    MilpModel master;
    for (int k = 0; k < inst.n(); ++k)
        master.add_binary("y" + std::to_string(k), inst.profits[static_cast<size_t>(k)]);
    int zi = -1;
    if (f == CkpFormulation::Refined || f == CkpFormulation::B)
        zi = master.add_continuous("z", 0.0, 0.0, ckp_z_upper(inst));
    if (f == CkpFormulation::N) sqrt_kappa(inst, f);  // domain check before solving

    LinearCut budget;
    budget.origin = CutOrigin::budget;
    budget.sense = RowSense::le;
    budget.rhs = inst.capacity;
    for (int k = 0; k < inst.n(); ++k) budget.row[k] = inst.mean_weights[static_cast<size_t>(k)];
    master.add_row(budget);

    const double log_tau = std::log(inst.tau);
    const auto to_y = [&](const std::vector<double>& x) {
        std::vector<int> y(static_cast<size_t>(inst.n()));
        for (int k = 0; k < inst.n(); ++k)
            y[static_cast<size_t>(k)] = static_cast<int>(std::round(x[static_cast<size_t>(k)]));
        return y;
    };

    LazyCutCallback callback;
    if (f != CkpFormulation::KP) {
        callback = [&, zi](const std::vector<double>& x) -> std::vector<LinearCut> {
            const std::vector<int> y = to_y(x);
            const double z = zi >= 0 ? x[static_cast<size_t>(zi)] : 0.0;
            std::vector<LinearCut> cuts;

            if (f == CkpFormulation::B) {
                // The z >= b_k y_k links are themselves added lazily.
                bool missing_link = false;
                for (int k = 0; k < inst.n(); ++k) {
                    if (y[static_cast<size_t>(k)] &&
                        z < inst.b_upper[static_cast<size_t>(k)] - options.cut_violation) {
                        LinearCut link;
                        link.origin = CutOrigin::bound_link;
                        link.sense = RowSense::le;
                        link.row[k] = inst.b_upper[static_cast<size_t>(k)];
                        link.row[zi] = -1.0;
                        link.rhs = 0.0;
                        cuts.push_back(std::move(link));
                        missing_link = true;
                    }
                }
                if (missing_link) return cuts;
            }

            if (ckp_constraint_value(inst, f, y, z) <= options.cut_violation) return {};

            LinearCut cut;
            cut.origin = CutOrigin::outer_approx;
            cut.sense = RowSense::le;
            switch (f) {
                case CkpFormulation::N:
                case CkpFormulation::H:
                case CkpFormulation::C: {
                    // kappa sqrt(y^T Q y) + mean^T y <= C linearized at y_hat;
                    // the norm is 1-homogeneous so the tangent passes through
                    // the origin and the rhs stays C.
                    const double kappa = sqrt_kappa(inst, f);
                    double norm = 0.0;
                    for (int k = 0; k < inst.n(); ++k)
                        if (y[static_cast<size_t>(k)]) norm += sqrt_q(inst, f, k);
                    norm = std::sqrt(norm);
                    for (int k = 0; k < inst.n(); ++k) {
                        double coef = inst.mean_weights[static_cast<size_t>(k)];
                        if (norm > 0.0 && y[static_cast<size_t>(k)])
                            coef += kappa * sqrt_q(inst, f, k) / norm;
                        cut.row[k] = coef;
                    }
                    cut.rhs = inst.capacity;
                    break;
                }
                case CkpFormulation::B: {
                    // L z/3 + sqrt(2L sum sigma^2 y^2 + L^2 z^2/9) + mean^T y <= C;
                    // again 1-homogeneous, tangent through the origin.
                    const double L = std::log(1.0 / inst.tau);
                    double f2 = L * L * z * z / 9.0;
                    for (int k = 0; k < inst.n(); ++k)
                        if (y[static_cast<size_t>(k)]) {
                            const double s = inst.sigmas[static_cast<size_t>(k)];
                            f2 += 2.0 * L * s * s;
                        }
                    const double fv = std::sqrt(f2);
                    for (int k = 0; k < inst.n(); ++k) {
                        double coef = inst.mean_weights[static_cast<size_t>(k)];
                        if (fv > 0.0 && y[static_cast<size_t>(k)]) {
                            const double s = inst.sigmas[static_cast<size_t>(k)];
                            coef += 2.0 * L * s * s / fv;
                        }
                        cut.row[k] = coef;
                    }
                    cut.row[zi] = L / 3.0 + (fv > 0.0 ? L * L * z / (9.0 * fv) : 0.0);
                    cut.rhs = inst.capacity;
                    break;
                }
                case CkpFormulation::Refined: {
                    // mean^T y + sum_k <grad Psi+_k(y_k, z), (y_k, z)> <= C + z ln(tau);
                    // by 1-homogeneity the tangent passes through the origin, so the
                    // cut is linear with no constant shift.
                    double zc = -log_tau;
                    for (int k = 0; k < inst.n(); ++k) {
                        double coef = inst.mean_weights[static_cast<size_t>(k)];
                        const double g = inst.gamma(k);
                        if (g > 0.0) {
                            const auto grad = psi_plus_grad(g, inst.b_upper[static_cast<size_t>(k)],
                                                            y[static_cast<size_t>(k)], z);
                            coef += grad[0];
                            zc += grad[1];
                        }
                        cut.row[k] = coef;
                    }
                    cut.row[zi] = zc;
                    cut.rhs = inst.capacity;
                    break;
                }
                default: break;
            }
            cuts.push_back(std::move(cut));
            return cuts;
        };
    }

    BnbOptions bopt;
    bopt.mip_gap = options.mip_gap;
    bopt.time_limit = options.time_limit;
    const MilpSolution mip = bnb_solve(master, callback, bopt);

    KnapsackSolution sol;
    sol.formulation = f;
    sol.status = mip.status;
    sol.cuts_added = mip.cuts_added;
    sol.nodes = mip.nodes_explored;
    if (mip.status == SolveStatus::optimal || mip.status == SolveStatus::iteration_limit) {
        if (!mip.assignment.empty()) {
            sol.y = to_y(mip.assignment);
            sol.z = zi >= 0 ? mip.assignment[static_cast<size_t>(zi)] : 0.0;
            sol.objective = 0.0;
            for (int k = 0; k < inst.n(); ++k)
                if (sol.y[static_cast<size_t>(k)]) sol.objective += inst.profits[static_cast<size_t>(k)];
            sol.certificate = ckp_constraint_value(inst, f, sol.y, sol.z);
        }
    }
    sol.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

}  // namespace ccb
