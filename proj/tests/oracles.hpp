#pragma once
// Test-only reference implementations, kept independent of the library's
// evaluation paths: extended-precision direct formula evaluation, finite
// differences, dense-grid/golden minimization, exhaustive enumeration for
// the LP / knapsack / SVM solvers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ccb/knapsack.hpp"
#include "ccb/milp.hpp"
#include "ccb/sum_spec.hpp"

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Extended-precision phi: direct per-term log-sum-exp of
// ln((gamma e^{tb} + e^{-t gamma b}) / (1+gamma)) - t alpha, summed.
inline long double phi_reference(const ccb::SumSpec& spec, long double alpha, long double t) {
    long double acc = -static_cast<long double>(spec.n()) * alpha * t;
    for (const auto& tm : spec.terms()) {
        const long double b = tm.b_upper;
        const long double g = (static_cast<long double>(tm.sigma) / b) *
                              (static_cast<long double>(tm.sigma) / b);
        const long double x1 = logl(g) + t * b;
        const long double x2 = -t * g * b;
        const long double m = std::max(x1, x2);
        acc += m + logl(expl(x1 - m) + expl(x2 - m)) - logl(1.0L + g);
    }
    return acc;
}

template <class F>
double fd_central(F&& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// Dense-grid + golden-section minimizer of phi_alpha over the certified
// t-box (phi is convex in t, so the coarse grid cannot trap a wrong cell).
struct GridMin {
    long double value;
    long double t;
};

inline GridMin grid_phi_star(const ccb::SumSpec& spec, double alpha, int coarse = 4096) {
    const long double b_bar = spec.b_bar();
    const long double t_hi0 =
        -static_cast<long double>(spec.log_tau_minus()) / (spec.n() * (b_bar - alpha));
    long double lo = 0.0L, hi = t_hi0;
    int best = 0;
    long double best_v = phi_reference(spec, alpha, 0.0L);
    for (int i = 1; i <= coarse; ++i) {
        const long double v = phi_reference(spec, alpha, t_hi0 * i / coarse);
        if (v < best_v) {
            best_v = v;
            best = i;
        }
    }
    lo = t_hi0 * std::max(0, best - 1) / coarse;
    hi = t_hi0 * std::min(coarse, best + 1) / coarse;
    const long double invphi = (sqrtl(5.0L) - 1.0L) / 2.0L;
    long double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    long double f1 = phi_reference(spec, alpha, x1), f2 = phi_reference(spec, alpha, x2);
    for (int it = 0; it < 200 && hi - lo > 1e-15L * (1.0L + hi); ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = phi_reference(spec, alpha, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = phi_reference(spec, alpha, x2);
        }
    }
    const long double tm = 0.5L * (lo + hi);
    return {std::min({best_v, phi_reference(spec, alpha, tm)}), tm};
}

// Monotone inversion of alpha -> phi*_alpha at level ln(tau).
inline double grid_alpha_tau(const ccb::SumSpec& spec, double tau) {
    const long double target = logl(static_cast<long double>(tau));
    long double lo = 0.0L, hi = spec.b_bar();
    for (int it = 0; it < 120; ++it) {
        const long double mid = 0.5L * (lo + hi);
        const long double v =
            mid >= spec.b_bar() ? spec.log_tau_minus() : grid_phi_star(spec, static_cast<double>(mid)).value;
        if (v > target)
            lo = mid;
        else
            hi = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

// Dense grid for the Jebara-type Chernoff objective.
inline double jebara_grid(const ccb::SumSpec& spec, double d, double t_hi, int steps = 2000000) {
    long double best = 0.0L;
    for (int i = 1; i <= steps; ++i) {
        const long double t = t_hi * static_cast<long double>(i) / steps;
        long double acc = -t * d;
        for (const auto& tm : spec.terms())
            acc += logl(1.0L + static_cast<long double>(tm.gamma()) *
                                   (expm1l(t * tm.b_upper) - t * tm.b_upper));
        best = std::min(best, acc);
    }
    return static_cast<double>(best);
}

// ---------------------------------------------------------------------------
// Small dense linear solve (Gaussian elimination, partial pivoting).
// Returns false when the system is singular.
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double>& b) {
    const int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[static_cast<size_t>(r)][static_cast<size_t>(c)]) >
                std::abs(a[static_cast<size_t>(piv)][static_cast<size_t>(c)]))
                piv = r;
        if (std::abs(a[static_cast<size_t>(piv)][static_cast<size_t>(c)]) < 1e-11) return false;
        std::swap(a[static_cast<size_t>(piv)], a[static_cast<size_t>(c)]);
        std::swap(b[static_cast<size_t>(piv)], b[static_cast<size_t>(c)]);
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[static_cast<size_t>(r)][static_cast<size_t>(c)] /
                             a[static_cast<size_t>(c)][static_cast<size_t>(c)];
            if (f == 0.0) continue;
            for (int k = c; k < n; ++k)
                a[static_cast<size_t>(r)][static_cast<size_t>(k)] -=
                    f * a[static_cast<size_t>(c)][static_cast<size_t>(k)];
            b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(c)];
        }
    }
    for (int c = 0; c < n; ++c)
        b[static_cast<size_t>(c)] /= a[static_cast<size_t>(c)][static_cast<size_t>(c)];
    return true;
}

// Brute-force LP maximum by enumerating basic points: every choice of n
// active constraints among {rows as equalities, bounds}.  Returns -inf if
// no feasible vertex exists.
inline double lp_vertex_enum(const ccb::MilpModel& model) {
    const int n = static_cast<int>(model.vars.size());
    const int m = static_cast<int>(model.rows.size());
    struct Active {
        int kind;  // 0 = row, 1 = lower bound, 2 = upper bound
        int index;
    };
    std::vector<Active> cands;
    for (int i = 0; i < m; ++i) cands.push_back({0, i});
    for (int j = 0; j < n; ++j) {
        cands.push_back({1, j});
        if (std::isfinite(model.vars[static_cast<size_t>(j)].upper)) cands.push_back({2, j});
    }
    const int total = static_cast<int>(cands.size());
    std::vector<int> pick(static_cast<size_t>(n));
    double best = -kInf;

    const std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            std::vector<std::vector<double>> a(static_cast<size_t>(n),
                                               std::vector<double>(static_cast<size_t>(n), 0.0));
            std::vector<double> rhs(static_cast<size_t>(n), 0.0);
            for (int r = 0; r < n; ++r) {
                const Active& act = cands[static_cast<size_t>(pick[static_cast<size_t>(r)])];
                if (act.kind == 0) {
                    for (const auto& [j, coef] : model.rows[static_cast<size_t>(act.index)].row)
                        a[static_cast<size_t>(r)][static_cast<size_t>(j)] = coef;
                    rhs[static_cast<size_t>(r)] = model.rows[static_cast<size_t>(act.index)].rhs;
                } else {
                    a[static_cast<size_t>(r)][static_cast<size_t>(act.index)] = 1.0;
                    rhs[static_cast<size_t>(r)] =
                        act.kind == 1 ? model.vars[static_cast<size_t>(act.index)].lower
                                      : model.vars[static_cast<size_t>(act.index)].upper;
                }
            }
            if (!solve_linear(a, rhs)) return;
            // Feasibility of the candidate point.
            for (int j = 0; j < n; ++j) {
                if (rhs[static_cast<size_t>(j)] < model.vars[static_cast<size_t>(j)].lower - 1e-7 ||
                    rhs[static_cast<size_t>(j)] > model.vars[static_cast<size_t>(j)].upper + 1e-7)
                    return;
            }
            for (const auto& row : model.rows) {
                double v = 0.0;
                for (const auto& [j, coef] : row.row) v += coef * rhs[static_cast<size_t>(j)];
                if (row.sense == ccb::RowSense::le && v > row.rhs + 1e-7) return;
                if (row.sense == ccb::RowSense::ge && v < row.rhs - 1e-7) return;
                if (row.sense == ccb::RowSense::eq && std::abs(v - row.rhs) > 1e-7) return;
            }
            double obj = 0.0;
            for (int j = 0; j < n; ++j)
                obj += model.objective[static_cast<size_t>(j)] * rhs[static_cast<size_t>(j)];
            best = std::max(best, obj);
            return;
        }
        for (int c = start; c < total; ++c) {
            pick[static_cast<size_t>(depth)] = c;
            rec(c + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

// Classic DP for the deterministic 0/1 knapsack with integer weights.
inline double knapsack_dp(const std::vector<double>& profits, const std::vector<int>& weights,
                          int capacity) {
    std::vector<double> dp(static_cast<size_t>(capacity) + 1, 0.0);
    for (size_t k = 0; k < profits.size(); ++k)
        for (int c = capacity; c >= weights[k]; --c)
            dp[static_cast<size_t>(c)] =
                std::max(dp[static_cast<size_t>(c)], dp[static_cast<size_t>(c - weights[k])] + profits[k]);
    return dp[static_cast<size_t>(capacity)];
}

// ---------------------------------------------------------------------------
// Exhaustive chance-constrained knapsack: exact feasibility per selection,
// with z minimized by ternary search for the refined formulation.
inline double refined_min_over_z(const ccb::KnapsackInstance& inst, const std::vector<int>& y) {
    double v0 = -inst.capacity;  // z -> 0 recession value
    for (int k = 0; k < inst.n(); ++k)
        if (y[static_cast<size_t>(k)])
            v0 += inst.mean_weights[static_cast<size_t>(k)] + inst.b_upper[static_cast<size_t>(k)];
    const auto value = [&](double z) {
        return ccb::ckp_constraint_value(inst, ccb::CkpFormulation::Refined, y, z);
    };
    double lo = 1e-12, hi = ccb::ckp_z_upper(inst);
    for (int it = 0; it < 300; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (value(m1) <= value(m2))
            hi = m2;
        else
            lo = m1;
    }
    return std::min(v0, value(0.5 * (lo + hi)));
}

inline bool ckp_feasible_exact(const ccb::KnapsackInstance& inst, ccb::CkpFormulation f,
                               const std::vector<int>& y) {
    using ccb::CkpFormulation;
    switch (f) {
        case CkpFormulation::KP:
        case CkpFormulation::N:
        case CkpFormulation::H:
        case CkpFormulation::C:
            return ccb::ckp_constraint_value(inst, f, y, 0.0) <= 1e-9;
        case CkpFormulation::B: {
            double z = 0.0, wy = 0.0, s2 = 0.0;
            for (int k = 0; k < inst.n(); ++k)
                if (y[static_cast<size_t>(k)]) {
                    z = std::max(z, inst.b_upper[static_cast<size_t>(k)]);
                    wy += inst.mean_weights[static_cast<size_t>(k)];
                    s2 += inst.sigmas[static_cast<size_t>(k)] * inst.sigmas[static_cast<size_t>(k)];
                }
            const double d = inst.capacity - wy;
            if (d <= 0.0) return false;
            const double denom = s2 + z * d / 3.0;
            return denom == 0.0 ? true : -0.5 * d * d / denom <= std::log(inst.tau) + 1e-12;
        }
        case CkpFormulation::Refined: return refined_min_over_z(inst, y) <= 1e-9;
    }
    return false;
}

inline double brute_force_ckp(const ccb::KnapsackInstance& inst, ccb::CkpFormulation f) {
    const int n = inst.n();
    double best = -kInf;
    for (long mask = 0; mask < (1L << n); ++mask) {
        std::vector<int> y(static_cast<size_t>(n));
        double obj = 0.0;
        for (int k = 0; k < n; ++k)
            if (mask & (1L << k)) {
                y[static_cast<size_t>(k)] = 1;
                obj += inst.profits[static_cast<size_t>(k)];
            }
        if (obj <= best) continue;
        if (ckp_feasible_exact(inst, f, y)) best = obj;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Deterministic soft-margin SVM by KKT pattern enumeration (<= 6 points).
// Patterns assign each point to a_i = 0, a_i free in (0,C), or a_i = C.
struct SvmOracle {
    std::vector<double> w;
    double w0 = 0.0;
    double objective = kInf;
};

inline SvmOracle svm_softmargin_enum(const std::vector<std::vector<double>>& x,
                                     const std::vector<int>& l, double c_svm) {
    const int m = static_cast<int>(x.size());
    const int dim = static_cast<int>(x.front().size());
    SvmOracle best;

    std::vector<int> pattern(static_cast<size_t>(m), 0);  // 0 = off, 1 = free, 2 = capped
    const auto eval_candidate = [&](const std::vector<double>& a, double w0) {
        std::vector<double> w(static_cast<size_t>(dim), 0.0);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < dim; ++k)
                w[static_cast<size_t>(k)] +=
                    a[static_cast<size_t>(i)] * l[static_cast<size_t>(i)] * x[static_cast<size_t>(i)][static_cast<size_t>(k)];
        // KKT inequality checks.
        for (int i = 0; i < m; ++i) {
            double margin = w0;
            for (int k = 0; k < dim; ++k)
                margin += w[static_cast<size_t>(k)] * x[static_cast<size_t>(i)][static_cast<size_t>(k)];
            margin *= l[static_cast<size_t>(i)];
            if (pattern[static_cast<size_t>(i)] == 0 && margin < 1.0 - 1e-8) return;
            if (pattern[static_cast<size_t>(i)] == 1 && std::abs(margin - 1.0) > 1e-7) return;
            if (pattern[static_cast<size_t>(i)] == 2 && margin > 1.0 + 1e-8) return;
            if (pattern[static_cast<size_t>(i)] == 1 &&
                (a[static_cast<size_t>(i)] < -1e-9 || a[static_cast<size_t>(i)] > c_svm + 1e-9))
                return;
        }
        double obj = 0.0;
        for (int k = 0; k < dim; ++k) obj += 0.5 * w[static_cast<size_t>(k)] * w[static_cast<size_t>(k)];
        for (int i = 0; i < m; ++i) {
            double margin = w0;
            for (int k = 0; k < dim; ++k)
                margin += w[static_cast<size_t>(k)] * x[static_cast<size_t>(i)][static_cast<size_t>(k)];
            obj += c_svm * std::max(0.0, 1.0 - l[static_cast<size_t>(i)] * margin);
        }
        if (obj < best.objective) {
            best.objective = obj;
            best.w = w;
            best.w0 = w0;
        }
    };

    const std::function<void(int)> rec = [&](int depth) {
        if (depth == m) {
            std::vector<int> free;
            std::vector<double> a(static_cast<size_t>(m), 0.0);
            for (int i = 0; i < m; ++i) {
                if (pattern[static_cast<size_t>(i)] == 1) free.push_back(i);
                if (pattern[static_cast<size_t>(i)] == 2) a[static_cast<size_t>(i)] = c_svm;
            }
            const int nf = static_cast<int>(free.size());
            if (nf == 0) {
                // w fixed by the capped set; sweep w0 over the hinge breakpoints.
                double bal = 0.0;
                for (int i = 0; i < m; ++i) bal += a[static_cast<size_t>(i)] * l[static_cast<size_t>(i)];
                if (std::abs(bal) > 1e-9) return;  // stationarity in w0 fails
                std::vector<double> w(static_cast<size_t>(dim), 0.0);
                for (int i = 0; i < m; ++i)
                    for (int k = 0; k < dim; ++k)
                        w[static_cast<size_t>(k)] += a[static_cast<size_t>(i)] * l[static_cast<size_t>(i)] *
                                                     x[static_cast<size_t>(i)][static_cast<size_t>(k)];
                for (int i = 0; i < m; ++i) {
                    double wx = 0.0;
                    for (int k = 0; k < dim; ++k)
                        wx += w[static_cast<size_t>(k)] * x[static_cast<size_t>(i)][static_cast<size_t>(k)];
                    eval_candidate(a, l[static_cast<size_t>(i)] - wx);  // margin_i = 1 breakpoint
                }
                return;
            }
            // Unknowns: a_free then w0.  Margin equations for the free set,
            // plus the balance sum a_i l_i = 0.
            const int dimsys = nf + 1;
            std::vector<std::vector<double>> A(static_cast<size_t>(dimsys),
                                               std::vector<double>(static_cast<size_t>(dimsys), 0.0));
            std::vector<double> rhs(static_cast<size_t>(dimsys), 0.0);
            for (int r = 0; r < nf; ++r) {
                const int i = free[static_cast<size_t>(r)];
                double dot_cap = 0.0;
                for (int j = 0; j < m; ++j) {
                    if (pattern[static_cast<size_t>(j)] != 2) continue;
                    double d = 0.0;
                    for (int k = 0; k < dim; ++k)
                        d += x[static_cast<size_t>(i)][static_cast<size_t>(k)] * x[static_cast<size_t>(j)][static_cast<size_t>(k)];
                    dot_cap += c_svm * l[static_cast<size_t>(j)] * d;
                }
                for (int cidx = 0; cidx < nf; ++cidx) {
                    const int j = free[static_cast<size_t>(cidx)];
                    double d = 0.0;
                    for (int k = 0; k < dim; ++k)
                        d += x[static_cast<size_t>(i)][static_cast<size_t>(k)] * x[static_cast<size_t>(j)][static_cast<size_t>(k)];
                    A[static_cast<size_t>(r)][static_cast<size_t>(cidx)] = l[static_cast<size_t>(j)] * d;
                }
                A[static_cast<size_t>(r)][static_cast<size_t>(nf)] = 1.0;
                rhs[static_cast<size_t>(r)] = l[static_cast<size_t>(i)] - dot_cap;  // l_i(w.x_i + w0) = 1
            }
            double cap_bal = 0.0;
            for (int j = 0; j < m; ++j)
                if (pattern[static_cast<size_t>(j)] == 2) cap_bal += c_svm * l[static_cast<size_t>(j)];
            for (int cidx = 0; cidx < nf; ++cidx)
                A[static_cast<size_t>(nf)][static_cast<size_t>(cidx)] = l[free[static_cast<size_t>(cidx)]];
            rhs[static_cast<size_t>(nf)] = -cap_bal;
            if (!solve_linear(A, rhs)) return;
            for (int cidx = 0; cidx < nf; ++cidx)
                a[static_cast<size_t>(free[static_cast<size_t>(cidx)])] = rhs[static_cast<size_t>(cidx)];
            eval_candidate(a, rhs[static_cast<size_t>(nf)]);
            return;
        }
        for (int p = 0; p < 3; ++p) {
            pattern[static_cast<size_t>(depth)] = p;
            rec(depth + 1);
        }
    };
    rec(0);
    return best;
}

}  // namespace oracle
