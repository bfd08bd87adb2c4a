#include "ccb/svm.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ccb/knapsack.hpp"  // psi_plus family
#include "ccb/numeric.hpp"
#include "json.hpp"

namespace ccb {

double psi(double gamma, double b, double y, double z) {
    if (y >= 0.0) return psi_plus(gamma, b, y, z);
    return psi_plus(1.0 / gamma, b * gamma, y, z);
}

std::array<double, 2> psi_grad(double gamma, double b, double y, double z) {
    if (y >= 0.0) return psi_plus_grad(gamma, b, y, z);
    return psi_plus_grad(1.0 / gamma, b * gamma, y, z);
}

std::array<double, 4> psi_hess(double gamma, double b, double y, double z) {
    if (y >= 0.0) return psi_plus_hess(gamma, b, y, z);
    return psi_plus_hess(1.0 / gamma, b * gamma, y, z);
}

void SvmDataset::validate() const {
    const size_t M = points.size();
    if (M == 0) throw std::invalid_argument("SvmDataset: empty");
    if (labels.size() != M || sigmas.size() != M || bounds.size() != M || taus.size() != M)
        throw std::invalid_argument("SvmDataset: field length mismatch");
    const size_t N = points.front().size();
    for (size_t i = 0; i < M; ++i) {
        if (points[i].size() != N || sigmas[i].size() != N || bounds[i].size() != N)
            throw std::invalid_argument("SvmDataset: inconsistent dimension");
        if (labels[i] != 1 && labels[i] != -1)
            throw std::invalid_argument("SvmDataset: labels must be -1 or +1");
        if (!(taus[i] > 0.0 && taus[i] < 1.0))
            throw std::invalid_argument("SvmDataset: tau_i must lie in (0,1)");
        for (size_t k = 0; k < N; ++k) {
            if (!(sigmas[i][k] >= 0.0)) throw std::invalid_argument("SvmDataset: sigma >= 0");
            if (!(bounds[i][k] > 0.0)) throw std::invalid_argument("SvmDataset: b > 0");
        }
    }
    if (!(c_svm > 0.0)) throw std::invalid_argument("SvmDataset: C must be > 0");
}

void SvmDataset::calibrate_uncertainty(double b_factor) {
    const int M = num_points(), N = dim();
    for (int cls : {-1, 1}) {
        std::vector<double> mean(static_cast<size_t>(N), 0.0), var(static_cast<size_t>(N), 0.0);
        int count = 0;
        for (int i = 0; i < M; ++i)
            if (labels[static_cast<size_t>(i)] == cls) {
                ++count;
                for (int k = 0; k < N; ++k) mean[static_cast<size_t>(k)] += points[static_cast<size_t>(i)][static_cast<size_t>(k)];
            }
        if (count == 0) continue;
        for (auto& m : mean) m /= count;
        for (int i = 0; i < M; ++i)
            if (labels[static_cast<size_t>(i)] == cls)
                for (int k = 0; k < N; ++k) {
                    const double d = points[static_cast<size_t>(i)][static_cast<size_t>(k)] - mean[static_cast<size_t>(k)];
                    var[static_cast<size_t>(k)] += d * d;
                }
        for (auto& v : var) v /= count;
        for (int i = 0; i < M; ++i)
            if (labels[static_cast<size_t>(i)] == cls)
                for (int k = 0; k < N; ++k) {
                    const double s = std::sqrt(var[static_cast<size_t>(k)]) / 10.0;
                    sigmas[static_cast<size_t>(i)][static_cast<size_t>(k)] = s;
                    // Zero-spread features stay deterministic; keep b positive.
                    bounds[static_cast<size_t>(i)][static_cast<size_t>(k)] =
                        s > 0.0 ? b_factor * s : 1.0;
                }
    }
}

SvmDataset SvmDataset::subset(const std::vector<int>& idx) const {
    SvmDataset d;
    d.c_svm = c_svm;
    for (int i : idx) {
        d.points.push_back(points[static_cast<size_t>(i)]);
        d.labels.push_back(labels[static_cast<size_t>(i)]);
        d.sigmas.push_back(sigmas[static_cast<size_t>(i)]);
        d.bounds.push_back(bounds[static_cast<size_t>(i)]);
        d.taus.push_back(taus[static_cast<size_t>(i)]);
    }
    return d;
}

SvmDataset load_svm_csv(const std::string& path, double tau, double c_svm) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    SvmDataset d;
    d.c_svm = c_svm;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<double> row;
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < 2) throw std::runtime_error("dataset row needs features and a label");
        const int label = static_cast<int>(std::lround(row.back()));
        row.pop_back();
        d.points.push_back(row);
        d.labels.push_back(label);
        d.sigmas.emplace_back(row.size(), 0.0);
        d.bounds.emplace_back(row.size(), 1.0);
        d.taus.push_back(tau);
    }
    d.calibrate_uncertainty();

    std::ifstream side(path + ".json");
    if (side) {
        std::stringstream buf;
        buf << side.rdbuf();
        const auto doc = nlohmann::json::parse(buf.str());
        if (doc.contains("sigmas")) d.sigmas = doc["sigmas"].get<std::vector<std::vector<double>>>();
        if (doc.contains("bounds")) d.bounds = doc["bounds"].get<std::vector<std::vector<double>>>();
        if (doc.contains("taus")) d.taus = doc["taus"].get<std::vector<double>>();
    }
    d.validate();
    return d;
}

std::string to_string(SvmMethod m) {
    switch (m) {
        case SvmMethod::Refined: return "refined";
        case SvmMethod::Cantelli: return "cantelli";
        case SvmMethod::Deterministic: return "deterministic";
    }
    return "?";
}

SvmMethod svm_method_from_string(const std::string& s) {
    if (s == "refined") return SvmMethod::Refined;
    if (s == "cantelli") return SvmMethod::Cantelli;
    if (s == "deterministic") return SvmMethod::Deterministic;
    throw std::invalid_argument("unknown svm method: " + s);
}

namespace {

constexpr double kCantelliEps = 1e-9;  // smoothing of the norm at w = 0

// Interior-point state for one solve.  Globals (w, w0) couple every
// constraint; each point i owns locals xi_i (and z_i for the refined
// method), so the Newton system is solved by eliminating the per-point
// 1x1/2x2 blocks and factoring the (N+1) Schur complement.
struct Barrier {
    const SvmDataset& data;
    SvmMethod method;
    const SvmOptions& opt;
    int N, M, G, L;  // dim, points, globals = N+1, locals per point

    Eigen::VectorXd w;  // (w, w0) stacked, size G
    std::vector<double> xi, z;

    Barrier(const SvmDataset& d, SvmMethod m, const SvmOptions& o)
        : data(d), method(m), opt(o), N(d.dim()), M(d.num_points()), G(N + 1),
          L(m == SvmMethod::Refined ? 2 : 1) {
        w = Eigen::VectorXd::Zero(G);
        // Start slightly off the Cantelli norm kink so the smoothed
        // curvature stays bounded.
        if (method == SvmMethod::Cantelli) {
            Eigen::VectorXd dir = Eigen::VectorXd::Zero(G);
            for (int i = 0; i < M; ++i)
                for (int k = 0; k < N; ++k)
                    dir[k] += data.labels[static_cast<size_t>(i)] * data.points[static_cast<size_t>(i)][static_cast<size_t>(k)];
            const double nrm = dir.norm();
            if (nrm > 0.0) w = 1e-3 * dir / nrm;
        }
        z.assign(static_cast<size_t>(M), 1.0);
        xi.assign(static_cast<size_t>(M), 0.0);
        for (int i = 0; i < M; ++i) {
            const double h = margin_part(i);
            xi[static_cast<size_t>(i)] = std::max(h + 1.0, 1.0);
        }
    }

    double kappa(int i) const { return std::sqrt(1.0 / data.taus[static_cast<size_t>(i)] - 1.0); }

    // g_i with xi_i = 0: the method-specific margin expression.
    double margin_part(int i) const {
        const auto& x = data.points[static_cast<size_t>(i)];
        const int l = data.labels[static_cast<size_t>(i)];
        double lin = w[N];
        for (int k = 0; k < N; ++k) lin += w[k] * x[static_cast<size_t>(k)];
        double g = 1.0 - l * lin;
        switch (method) {
            case SvmMethod::Deterministic: break;
            case SvmMethod::Cantelli: {
                double r2 = kCantelliEps * kCantelliEps;
                for (int k = 0; k < N; ++k) {
                    const double s = data.sigmas[static_cast<size_t>(i)][static_cast<size_t>(k)];
                    r2 += s * s * w[k] * w[k];
                }
                g += kappa(i) * (std::sqrt(r2) - kCantelliEps);
                break;
            }
            case SvmMethod::Refined: {
                const double zi = z[static_cast<size_t>(i)];
                for (int k = 0; k < N; ++k) {
                    const double s = data.sigmas[static_cast<size_t>(i)][static_cast<size_t>(k)];
                    if (s == 0.0) continue;
                    const double b = data.bounds[static_cast<size_t>(i)][static_cast<size_t>(k)];
                    const double gam = (s / b) * (s / b);
                    g += psi(gam, b, w[k], zi);
                }
                g -= zi * std::log(data.taus[static_cast<size_t>(i)]);
                break;
            }
        }
        return g;
    }

    double constraint(int i) const { return margin_part(i) - xi[static_cast<size_t>(i)]; }

    double objective() const {
        double f = 0.5 * w.head(N).squaredNorm();
        for (int i = 0; i < M; ++i) f += data.c_svm * xi[static_cast<size_t>(i)];
        return f;
    }

    int num_ineq() const { return method == SvmMethod::Refined ? 3 * M : 2 * M; }

    double barrier_value(double mu) const {
        double v = objective();
        for (int i = 0; i < M; ++i) {
            const double g = constraint(i);
            if (!(g < 0.0) || !(xi[static_cast<size_t>(i)] > 0.0)) return kInf;
            v -= mu * std::log(-g) + mu * std::log(xi[static_cast<size_t>(i)]);
            if (method == SvmMethod::Refined) {
                const double slack = z[static_cast<size_t>(i)] - opt.z_min;
                if (!(slack > 0.0)) return kInf;
                v -= mu * std::log(slack);
            }
        }
        return v;
    }

    // One damped Newton step on the barrier; returns the decrement lambda^2.
    double newton_step(double mu) {
        Eigen::MatrixXd Agg = Eigen::MatrixXd::Zero(G, G);
        Eigen::VectorXd rg = Eigen::VectorXd::Zero(G);
        for (int k = 0; k < N; ++k) {  // objective 1/2 |w|^2
            Agg(k, k) += 1.0;
            rg[k] += w[k];
        }

        std::vector<Eigen::MatrixXd> D(static_cast<size_t>(M)), B(static_cast<size_t>(M));
        std::vector<Eigen::VectorXd> rl(static_cast<size_t>(M));
        Eigen::VectorXd qg(G);

        for (int i = 0; i < M; ++i) {
            const auto& x = data.points[static_cast<size_t>(i)];
            const int l = data.labels[static_cast<size_t>(i)];
            const double g = constraint(i);
            const double c1 = mu / (-g), c2 = mu / (g * g);

            // Gradient of g_i over globals and locals.
            qg.setZero();
            for (int k = 0; k < N; ++k) qg[k] = -l * x[static_cast<size_t>(k)];
            qg[N] = -l;
            Eigen::VectorXd ql = Eigen::VectorXd::Zero(L);
            ql[0] = -1.0;  // d/dxi

            Eigen::MatrixXd Pgg = Eigen::MatrixXd::Zero(G, G);
            Eigen::MatrixXd Plg = Eigen::MatrixXd::Zero(L, G);
            Eigen::MatrixXd Pll = Eigen::MatrixXd::Zero(L, L);

            if (method == SvmMethod::Cantelli) {
                double r2 = kCantelliEps * kCantelliEps;
                Eigen::VectorXd sw = Eigen::VectorXd::Zero(N);
                for (int k = 0; k < N; ++k) {
                    const double s = data.sigmas[static_cast<size_t>(i)][static_cast<size_t>(k)];
                    sw[k] = s * s * w[k];
                    r2 += s * s * w[k] * w[k];
                }
                const double r = std::sqrt(r2), kap = kappa(i);
                for (int k = 0; k < N; ++k) qg[k] += kap * sw[k] / r;
                for (int k = 0; k < N; ++k) {
                    const double s = data.sigmas[static_cast<size_t>(i)][static_cast<size_t>(k)];
                    Pgg(k, k) += kap * s * s / r;
                }
                Pgg.topLeftCorner(N, N) -= (kap / (r2 * r)) * sw * sw.transpose();
            } else if (method == SvmMethod::Refined) {
                const double zi = z[static_cast<size_t>(i)];
                double dz = -std::log(data.taus[static_cast<size_t>(i)]);
                double hzz = 0.0;
                for (int k = 0; k < N; ++k) {
                    const double s = data.sigmas[static_cast<size_t>(i)][static_cast<size_t>(k)];
                    if (s == 0.0) continue;
                    const double b = data.bounds[static_cast<size_t>(i)][static_cast<size_t>(k)];
                    const double gam = (s / b) * (s / b);
                    const auto gr = psi_grad(gam, b, w[k], zi);
                    const auto he = psi_hess(gam, b, w[k], zi);
                    qg[k] += gr[0];
                    dz += gr[1];
                    Pgg(k, k) += he[0];
                    Plg(1, k) += he[1];
                    hzz += he[3];
                }
                ql[1] = dz;
                Pll(1, 1) = hzz;
            }

            Agg += c2 * qg * qg.transpose() + c1 * Pgg;
            B[static_cast<size_t>(i)] = c2 * ql * qg.transpose() + c1 * Plg;
            D[static_cast<size_t>(i)] = c2 * ql * ql.transpose() + c1 * Pll;
            rg += c1 * qg;
            rl[static_cast<size_t>(i)] = c1 * ql;

            // xi and z barrier/objective terms.
            rl[static_cast<size_t>(i)][0] += data.c_svm - mu / xi[static_cast<size_t>(i)];
            D[static_cast<size_t>(i)](0, 0) += mu / (xi[static_cast<size_t>(i)] * xi[static_cast<size_t>(i)]);
            if (method == SvmMethod::Refined) {
                const double slack = z[static_cast<size_t>(i)] - opt.z_min;
                rl[static_cast<size_t>(i)][1] += -mu / slack;
                D[static_cast<size_t>(i)](1, 1) += mu / (slack * slack);
            }
        }

        // Schur complement on the globals.
        Eigen::MatrixXd S = Agg;
        Eigen::VectorXd rhs = -rg;
        std::vector<Eigen::MatrixXd> Dinv(static_cast<size_t>(M));
        for (int i = 0; i < M; ++i) {
            Dinv[static_cast<size_t>(i)] = D[static_cast<size_t>(i)].inverse();
            S -= B[static_cast<size_t>(i)].transpose() * Dinv[static_cast<size_t>(i)] * B[static_cast<size_t>(i)];
            rhs += B[static_cast<size_t>(i)].transpose() * (Dinv[static_cast<size_t>(i)] * rl[static_cast<size_t>(i)]);
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
        if (ldlt.info() != Eigen::Success)
            ldlt.compute(S + 1e-12 * Eigen::MatrixXd::Identity(G, G));
        const Eigen::VectorXd dw = ldlt.solve(rhs);

        std::vector<Eigen::VectorXd> dl(static_cast<size_t>(M));
        double dirderiv = rg.dot(dw);
        for (int i = 0; i < M; ++i) {
            dl[static_cast<size_t>(i)] =
                -Dinv[static_cast<size_t>(i)] * (rl[static_cast<size_t>(i)] + B[static_cast<size_t>(i)] * dw);
            dirderiv += rl[static_cast<size_t>(i)].dot(dl[static_cast<size_t>(i)]);
        }
        const double decrement = -dirderiv;
        if (!(decrement > 0.0)) return 0.0;  // at the stage optimum (or numerics)

        // Fraction-to-boundary on the simple bounds, then backtrack on the
        // barrier merit (which enforces g_i < 0 itself).
        double t = 1.0;
        for (int i = 0; i < M; ++i) {
            if (dl[static_cast<size_t>(i)][0] < 0.0)
                t = std::min(t, 0.995 * xi[static_cast<size_t>(i)] / -dl[static_cast<size_t>(i)][0]);
            if (L == 2 && dl[static_cast<size_t>(i)][1] < 0.0)
                t = std::min(t, 0.995 * (z[static_cast<size_t>(i)] - opt.z_min) / -dl[static_cast<size_t>(i)][1]);
        }
        const double base = barrier_value(mu);
        const Eigen::VectorXd w_old = w;
        const std::vector<double> xi_old = xi, z_old = z;
        for (int bt = 0; bt < 60; ++bt) {
            w = w_old + t * dw;
            for (int i = 0; i < M; ++i) {
                xi[static_cast<size_t>(i)] = xi_old[static_cast<size_t>(i)] + t * dl[static_cast<size_t>(i)][0];
                if (L == 2) z[static_cast<size_t>(i)] = z_old[static_cast<size_t>(i)] + t * dl[static_cast<size_t>(i)][1];
            }
            if (barrier_value(mu) <= base + 0.25 * t * dirderiv) return decrement;
            t *= 0.5;
        }
        w = w_old;
        xi = xi_old;
        z = z_old;
        return 0.0;  // no acceptable step
    }
};

}  // namespace

SvmSolution solve_svm(const SvmDataset& data, SvmMethod method, const SvmOptions& opt) {
    data.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Barrier st(data, method, opt);

    SvmSolution sol;
    double mu = 1.0;
    const double mu_final = opt.duality_tol / st.num_ineq();
    bool converged = true;
    int total_newton = 0;
    for (;;) {
        for (int it = 0;; ++it) {
            if (total_newton >= opt.max_newton) {
                converged = false;
                break;
            }
            ++total_newton;
            const double dec = st.newton_step(mu);
            if (dec * 0.5 <= 1e-10 || it >= 80) break;
        }
        if (!converged || mu <= mu_final) break;
        mu = std::max(mu / opt.barrier_reduction, mu_final);
    }

    sol.w.assign(st.w.data(), st.w.data() + data.dim());
    sol.w0 = st.w[data.dim()];
    sol.xi = st.xi;
    if (method == SvmMethod::Refined) sol.z = st.z;
    sol.objective = st.objective();
    sol.residuals.resize(static_cast<size_t>(data.num_points()));
    for (int i = 0; i < data.num_points(); ++i) sol.residuals[static_cast<size_t>(i)] = st.constraint(i);
    sol.converged = converged;
    sol.newton_iterations = total_newton;
    sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

double svm_score(const SvmSolution& sol, const SvmDataset& test) {
    if (test.num_points() == 0) throw std::invalid_argument("svm_score: empty test split");
    int agree = 0;
    for (int i = 0; i < test.num_points(); ++i) {
        double v = sol.w0;
        for (int k = 0; k < test.dim(); ++k) v += sol.w[static_cast<size_t>(k)] * test.points[static_cast<size_t>(i)][static_cast<size_t>(k)];
        const int pred = v >= 0.0 ? 1 : -1;
        if (pred == test.labels[static_cast<size_t>(i)]) ++agree;
    }
    return static_cast<double>(agree) / test.num_points();
}

}  // namespace ccb
