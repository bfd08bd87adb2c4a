#include "ccb/exp_cone.hpp"

#include <cmath>
#include <stdexcept>

#include "ccb/numeric.hpp"
#include "ccb/rng.hpp"
#include "ccb/svm.hpp"  // psi, for the direct side of the equivalence check
#include "json.hpp"

namespace ccb {

namespace {

nlohmann::json expr_to_json(const AffineExpr& e) {
    nlohmann::json terms = nlohmann::json::object();
    for (const auto& [var, coef] : e.terms) terms[std::to_string(var)] = coef;
    return {{"const", e.constant}, {"terms", terms}};
}

}  // namespace

std::string ExpConeSystem::to_json() const {
    nlohmann::json doc;
    doc["variables"] = var_names;
    auto& cones_json = doc["cones"] = nlohmann::json::array();
    for (const auto& c : cones) cones_json.push_back({expr_to_json(c[0]), expr_to_json(c[1]), expr_to_json(c[2])});
    auto& rows_json = doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows) rows_json.push_back({{"lhs", expr_to_json(r.lhs)}, {"rhs", r.rhs}});
    return doc.dump();
}

ExpConeSystem expand_psi_constraint(const std::vector<std::pair<double, double>>& gamma_b,
                                    const std::vector<double>& y, double z, double u) {
    if (!(z > 0.0)) throw std::domain_error("expand_psi_constraint: z must be > 0");
    if (gamma_b.size() != y.size())
        throw std::invalid_argument("expand_psi_constraint: size mismatch");

    ExpConeSystem sys;
    const int n = static_cast<int>(y.size());
    // Variable layout: eta_k, nu_k, v_k for k = 0..n-1.
    for (int k = 0; k < n; ++k) {
        sys.var_names.push_back("eta_" + std::to_string(k));
        sys.var_names.push_back("nu_" + std::to_string(k));
        sys.var_names.push_back("v_" + std::to_string(k));
    }
    AffineExpr aggregate;  // sum v_k <= u
    for (int k = 0; k < n; ++k) {
        double gam = gamma_b[static_cast<size_t>(k)].first;
        double b = gamma_b[static_cast<size_t>(k)].second;
        if (!(gam > 0.0) || !(b > 0.0))
            throw std::domain_error("expand_psi_constraint: gamma and b must be > 0");
        // Psi is the max of two Psi+ branches; the one matching sign(y_k)
        // attains it, so emit that branch's encoding.
        if (y[static_cast<size_t>(k)] < 0.0) {
            b = b * gam;
            gam = 1.0 / gam;
        }
        const int eta = 3 * k, nu = 3 * k + 1, v = 3 * k + 2;

        ExpConeSystem::Row row;  // gamma eta + nu <= (1+gamma) z
        row.lhs.terms[eta] = gam;
        row.lhs.terms[nu] = 1.0;
        row.rhs = (1.0 + gam) * z;
        sys.rows.push_back(std::move(row));

        std::array<AffineExpr, 3> cone1;  // (eta, z, y b - v)
        cone1[0].terms[eta] = 1.0;
        cone1[1].constant = z;
        cone1[2].constant = y[static_cast<size_t>(k)] * b;
        cone1[2].terms[v] = -1.0;
        sys.cones.push_back(std::move(cone1));

        std::array<AffineExpr, 3> cone2;  // (nu, z, -y b gamma - v)
        cone2[0].terms[nu] = 1.0;
        cone2[1].constant = z;
        cone2[2].constant = -y[static_cast<size_t>(k)] * b * gam;
        cone2[2].terms[v] = -1.0;
        sys.cones.push_back(std::move(cone2));

        aggregate.terms[v] = 1.0;
    }
    ExpConeSystem::Row agg;
    agg.lhs = std::move(aggregate);
    agg.rhs = u;
    sys.rows.push_back(std::move(agg));
    return sys;
}

bool ExpConeSystem::feasible(double tol) const {
    // The generator emits, per k, one linear row over (eta_k, nu_k) and two
    // cones tying them to v_k.  With eta, nu at their cone-tight values the
    // row reads gamma e^{(yb-v)/z} + e^{(-yb gamma-v)/z} <= 1+gamma, whose
    // smallest solution is v_k = z * (logsumexp of the two exponents
    // - ln(1+gamma)); the system is feasible iff sum v_k* <= u.
    double sum_v = 0.0;
    const size_t n = cones.size() / 2;
    for (size_t k = 0; k < n; ++k) {
        const auto& row = rows[k];
        const auto& cone1 = cones[2 * k];
        const auto& cone2 = cones[2 * k + 1];
        const double z = cone1[1].constant;
        const int eta = cone1[0].terms.begin()->first;
        const double gam = row.lhs.terms.at(eta);
        const double x1 = cone1[2].constant;  // y b
        const double x2 = cone2[2].constant;  // -y b gamma
        // v* = z * [ lse(ln(gam) + x1/z, x2/z) - ln(1+gam) ]
        const double lse = log_add_exp(std::log(gam) + x1 / z, x2 / z);
        sum_v += z * (lse - std::log1p(gam));
    }
    return sum_v <= rows.back().rhs + tol;
}

double check_equivalence(const std::vector<std::pair<double, double>>& gamma_b, int samples,
                         std::uint64_t seed) {
    Rng rng(seed);
    long agree = 0, counted = 0;
    const int n = static_cast<int>(gamma_b.size());
    for (int s = 0; s < samples; ++s) {
        std::vector<double> y(static_cast<size_t>(n));
        for (auto& v : y) v = rng.uniform(-3.0, 3.0);
        const double z = rng.uniform(0.05, 5.0);
        double psi_sum = 0.0;
        for (int k = 0; k < n; ++k)
            psi_sum += psi(gamma_b[static_cast<size_t>(k)].first, gamma_b[static_cast<size_t>(k)].second,
                           y[static_cast<size_t>(k)], z);
        // Sample u around the boundary so both outcomes occur.
        const double u = psi_sum + rng.uniform(-1.0, 1.0);
        if (std::abs(psi_sum - u) <= 1e-9) continue;  // boundary band: ties tolerated
        ++counted;
        const bool direct = psi_sum <= u;
        const bool conic = expand_psi_constraint(gamma_b, y, z, u).feasible();
        if (direct == conic) ++agree;
    }
    return counted == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(counted);
}

}  // namespace ccb
