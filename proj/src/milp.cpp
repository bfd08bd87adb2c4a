#include "ccb/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "ccb/numeric.hpp"

namespace ccb {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;
constexpr int kDegeneratePivotLimit = 2000;

enum class NbStatus { basic, at_lower, at_upper };

// Dense bounded-variable primal simplex (full tableau, two-phase with
// artificials).  Columns: structurals, then one slack per row, then the
// artificials needed for an infeasible slack start.  Rows are normalized
// so every basis column starts as +1 identity.
class Simplex {
public:
    explicit Simplex(const MilpModel& model) {
        n_ = static_cast<int>(model.vars.size());
        m_ = static_cast<int>(model.rows.size());
        lo_.assign(static_cast<size_t>(n_), 0.0);
        up_.assign(static_cast<size_t>(n_), 0.0);
        for (int j = 0; j < n_; ++j) {
            const auto& v = model.vars[static_cast<size_t>(j)];
            lo_[static_cast<size_t>(j)] = v.lower;
            up_[static_cast<size_t>(j)] = v.upper;
        }

        // Normalize rows: ge -> le by negation; eq kept with slack fixed at 0.
        std::vector<std::vector<double>> rows(static_cast<size_t>(m_),
                                              std::vector<double>(static_cast<size_t>(n_), 0.0));
        std::vector<double> rhs(static_cast<size_t>(m_), 0.0);
        std::vector<bool> is_eq(static_cast<size_t>(m_), false);
        for (int i = 0; i < m_; ++i) {
            const auto& cut = model.rows[static_cast<size_t>(i)];
            double sign = cut.sense == RowSense::ge ? -1.0 : 1.0;
            for (const auto& [j, a] : cut.row) rows[static_cast<size_t>(i)][static_cast<size_t>(j)] = sign * a;
            rhs[static_cast<size_t>(i)] = sign * cut.rhs;
            is_eq[static_cast<size_t>(i)] = cut.sense == RowSense::eq;
        }

        // Slack bounds and initial residuals at the all-lower point.
        for (int i = 0; i < m_; ++i) {
            lo_.push_back(0.0);
            up_.push_back(is_eq[static_cast<size_t>(i)] ? 0.0 : kInf);
        }
        std::vector<double> resid(rhs);
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j)
                resid[static_cast<size_t>(i)] -= rows[static_cast<size_t>(i)][static_cast<size_t>(j)] * lo_[static_cast<size_t>(j)];

        // Decide artificials; negate rows whose residual is negative so the
        // starting basis column is +1.
        basis_.assign(static_cast<size_t>(m_), -1);
        std::vector<int> art_row;
        for (int i = 0; i < m_; ++i) {
            const bool need_art = is_eq[static_cast<size_t>(i)] ? resid[static_cast<size_t>(i)] != 0.0
                                                                : resid[static_cast<size_t>(i)] < 0.0;
            if (!need_art) continue;
            if (resid[static_cast<size_t>(i)] < 0.0) {
                for (auto& a : rows[static_cast<size_t>(i)]) a = -a;
                rhs[static_cast<size_t>(i)] = -rhs[static_cast<size_t>(i)];
                resid[static_cast<size_t>(i)] = -resid[static_cast<size_t>(i)];
                slack_sign_.push_back(-1.0);
            } else {
                slack_sign_.push_back(1.0);
            }
            art_row.push_back(i);
        }
        na_ = static_cast<int>(art_row.size());
        ncols_ = n_ + m_ + na_;

        tab_.assign(static_cast<size_t>(m_), std::vector<double>(static_cast<size_t>(ncols_), 0.0));
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j) tab_[static_cast<size_t>(i)][static_cast<size_t>(j)] = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
        // Slack columns (sign flipped where the row was negated).
        std::vector<double> srow_sign(static_cast<size_t>(m_), 1.0);
        for (size_t a = 0; a < art_row.size(); ++a) srow_sign[static_cast<size_t>(art_row[a])] = slack_sign_[a];
        for (int i = 0; i < m_; ++i) tab_[static_cast<size_t>(i)][static_cast<size_t>(n_ + i)] = srow_sign[static_cast<size_t>(i)];
        for (int a = 0; a < na_; ++a) {
            tab_[static_cast<size_t>(art_row[static_cast<size_t>(a)])][static_cast<size_t>(n_ + m_ + a)] = 1.0;
            lo_.push_back(0.0);
            up_.push_back(kInf);
        }

        status_.assign(static_cast<size_t>(ncols_), NbStatus::at_lower);
        xb_.assign(static_cast<size_t>(m_), 0.0);
        int next_art = 0;
        for (int i = 0; i < m_; ++i) {
            const bool has_art = next_art < na_ && art_row[static_cast<size_t>(next_art)] == i;
            const int bcol = has_art ? n_ + m_ + next_art : n_ + i;
            if (has_art) ++next_art;
            basis_[static_cast<size_t>(i)] = bcol;
            status_[static_cast<size_t>(bcol)] = NbStatus::basic;
            xb_[static_cast<size_t>(i)] = resid[static_cast<size_t>(i)];
        }

        obj_.assign(static_cast<size_t>(ncols_), 0.0);
        for (int j = 0; j < n_; ++j) obj_[static_cast<size_t>(j)] = model.objective[static_cast<size_t>(j)];
    }

    // Returns optimal/unbounded/infeasible/iteration_limit.
    SolveStatus solve() {
        if (na_ > 0) {
            std::vector<double> phase1(static_cast<size_t>(ncols_), 0.0);
            for (int a = 0; a < na_; ++a) phase1[static_cast<size_t>(n_ + m_ + a)] = -1.0;
            const SolveStatus s = optimize(phase1);
            if (s != SolveStatus::optimal && s != SolveStatus::unbounded)
                return s;  // the phase-1 objective is bounded, so unbounded cannot occur
            double infeas = 0.0;
            for (int a = 0; a < na_; ++a) infeas += value(n_ + m_ + a);
            if (infeas > kPhase1Tol) return SolveStatus::infeasible;
            for (int a = 0; a < na_; ++a) up_[static_cast<size_t>(n_ + m_ + a)] = 0.0;
        }
        return optimize(obj_);
    }

    double objective_value() const {
        double v = 0.0;
        for (int j = 0; j < n_; ++j) v += obj_[static_cast<size_t>(j)] * value(j);
        return v;
    }

    std::vector<double> primal() const {
        std::vector<double> x(static_cast<size_t>(n_));
        for (int j = 0; j < n_; ++j) x[static_cast<size_t>(j)] = value(j);
        return x;
    }

    long pivots() const { return pivots_; }
    double dual_residual() const { return dual_residual_; }

private:
    double value(int col) const {
        for (int i = 0; i < m_; ++i)
            if (basis_[static_cast<size_t>(i)] == col) return xb_[static_cast<size_t>(i)];
        return status_[static_cast<size_t>(col)] == NbStatus::at_upper ? up_[static_cast<size_t>(col)]
                                                                       : lo_[static_cast<size_t>(col)];
    }

    SolveStatus optimize(const std::vector<double>& c) {
        int degenerate_streak = 0;
        bool bland = false;
        const long max_pivots = 20000 + 200L * (m_ + ncols_);
        for (long iter = 0; iter < max_pivots; ++iter) {
            // Reduced costs d_j = c_j - c_B^T B^{-1} A_j via the tableau.
            std::vector<double> cb(static_cast<size_t>(m_));
            bool cb_zero = true;
            for (int i = 0; i < m_; ++i) {
                cb[static_cast<size_t>(i)] = c[static_cast<size_t>(basis_[static_cast<size_t>(i)])];
                cb_zero = cb_zero && cb[static_cast<size_t>(i)] == 0.0;
            }

            int enter = -1;
            double best_score = kReducedCostTol;
            double enter_dir = 0.0;
            dual_residual_ = 0.0;
            for (int j = 0; j < ncols_; ++j) {
                if (status_[static_cast<size_t>(j)] == NbStatus::basic) continue;
                if (lo_[static_cast<size_t>(j)] == up_[static_cast<size_t>(j)]) continue;  // fixed
                double d = c[static_cast<size_t>(j)];
                if (!cb_zero)
                    for (int i = 0; i < m_; ++i) d -= cb[static_cast<size_t>(i)] * tab_[static_cast<size_t>(i)][static_cast<size_t>(j)];
                const bool at_lower = status_[static_cast<size_t>(j)] == NbStatus::at_lower;
                const double score = at_lower ? d : -d;  // improvement per unit move
                if (score > dual_residual_) dual_residual_ = score;
                if (score > best_score) {
                    best_score = score;
                    enter = j;
                    enter_dir = at_lower ? 1.0 : -1.0;
                    if (bland) break;  // lowest eligible index
                }
            }
            if (enter == -1) return SolveStatus::optimal;

            // Ratio test; ties prefer the lowest blocking variable index.
            const double own_range = up_[static_cast<size_t>(enter)] - lo_[static_cast<size_t>(enter)];
            double t_max = own_range;
            int leave = -1;  // row index of blocking basic
            bool leave_at_upper = false;
            for (int i = 0; i < m_; ++i) {
                const double rho = enter_dir * tab_[static_cast<size_t>(i)][static_cast<size_t>(enter)];
                const int bj = basis_[static_cast<size_t>(i)];
                double t;
                bool at_upper;
                if (rho > kPivotTol) {  // basic decreases toward its lower bound
                    t = (xb_[static_cast<size_t>(i)] - lo_[static_cast<size_t>(bj)]) / rho;
                    at_upper = false;
                } else if (rho < -kPivotTol && up_[static_cast<size_t>(bj)] < kInf) {
                    t = (up_[static_cast<size_t>(bj)] - xb_[static_cast<size_t>(i)]) / (-rho);
                    at_upper = true;
                } else {
                    continue;
                }
                t = std::max(t, 0.0);
                const bool strictly_better = t < t_max - 1e-12;
                const bool tie_wins = leave != -1 && t <= t_max + 1e-12 &&
                                      bj < basis_[static_cast<size_t>(leave)];
                if (strictly_better || tie_wins) {
                    t_max = std::min(t_max, t);
                    leave = i;
                    leave_at_upper = at_upper;
                }
            }
            if (leave == -1 && !(own_range < kInf)) return SolveStatus::unbounded;

            degenerate_streak = t_max <= 1e-12 ? degenerate_streak + 1 : 0;
            if (degenerate_streak > kDegeneratePivotLimit) bland = true;

            // Move the entering variable by t_max.
            for (int i = 0; i < m_; ++i)
                xb_[static_cast<size_t>(i)] -= enter_dir * tab_[static_cast<size_t>(i)][static_cast<size_t>(enter)] * t_max;

            if (leave == -1) {  // bound flip, basis unchanged
                status_[static_cast<size_t>(enter)] = enter_dir > 0 ? NbStatus::at_upper : NbStatus::at_lower;
                ++pivots_;
                continue;
            }

            const int leave_col = basis_[static_cast<size_t>(leave)];
            const double enter_from =
                status_[static_cast<size_t>(enter)] == NbStatus::at_upper ? up_[static_cast<size_t>(enter)] : lo_[static_cast<size_t>(enter)];
            status_[static_cast<size_t>(leave_col)] = leave_at_upper ? NbStatus::at_upper : NbStatus::at_lower;
            status_[static_cast<size_t>(enter)] = NbStatus::basic;
            basis_[static_cast<size_t>(leave)] = enter;
            xb_[static_cast<size_t>(leave)] = enter_from + enter_dir * t_max;

            // Pivot the tableau on (leave, enter).
            const double piv = tab_[static_cast<size_t>(leave)][static_cast<size_t>(enter)];
            auto& prow = tab_[static_cast<size_t>(leave)];
            const double inv = 1.0 / piv;
            for (auto& v : prow) v *= inv;
            for (int i = 0; i < m_; ++i) {
                if (i == leave) continue;
                auto& row = tab_[static_cast<size_t>(i)];
                const double f = row[static_cast<size_t>(enter)];
                if (f == 0.0) continue;
                for (int j = 0; j < ncols_; ++j) row[static_cast<size_t>(j)] -= f * prow[static_cast<size_t>(j)];
            }
            ++pivots_;
        }
        return SolveStatus::iteration_limit;
    }

    int n_ = 0, m_ = 0, na_ = 0, ncols_ = 0;
    std::vector<std::vector<double>> tab_;
    std::vector<double> lo_, up_, obj_, xb_;
    std::vector<int> basis_;
    std::vector<NbStatus> status_;
    std::vector<double> slack_sign_;
    long pivots_ = 0;
    double dual_residual_ = 0.0;
};

MilpModel relax(const MilpModel& model) {
    MilpModel r = model;
    for (auto& v : r.vars)
        if (v.kind == VarKind::binary) {
            v.lower = std::max(v.lower, 0.0);
            v.upper = std::min(v.upper, 1.0);
        }
    return r;
}

}  // namespace

int MilpModel::add_binary(const std::string& name, double obj) {
    vars.push_back({name, VarKind::binary, 0.0, 1.0});
    objective.push_back(obj);
    return static_cast<int>(vars.size()) - 1;
}

int MilpModel::add_continuous(const std::string& name, double obj, double lo, double up) {
    vars.push_back({name, VarKind::continuous, lo, up});
    objective.push_back(obj);
    return static_cast<int>(vars.size()) - 1;
}

void MilpModel::add_row(LinearCut cut) { rows.push_back(std::move(cut)); }

void MilpModel::validate() const {
    if (objective.size() != vars.size())
        throw std::invalid_argument("MilpModel: objective/variable size mismatch");
    for (const auto& v : vars) {
        if (!std::isfinite(v.lower) || v.lower > v.upper)
            throw std::invalid_argument("MilpModel: variable needs finite lower <= upper");
        if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0))
            throw std::invalid_argument("MilpModel: binary bounds must lie in {0,1}");
    }
    for (const auto& r : rows) {
        if (r.row.empty()) throw std::invalid_argument("MilpModel: empty constraint row");
        for (const auto& [j, a] : r.row) {
            if (j < 0 || j >= static_cast<int>(vars.size()))
                throw std::invalid_argument("MilpModel: row references undeclared variable");
            if (!std::isfinite(a)) throw std::invalid_argument("MilpModel: non-finite coefficient");
        }
        if (!std::isfinite(r.rhs)) throw std::invalid_argument("MilpModel: non-finite rhs");
    }
}

std::string MilpModel::to_lp_string() const {
    std::ostringstream os;
    os << "max:";
    for (size_t j = 0; j < vars.size(); ++j) {
        if (objective[j] == 0.0) continue;
        os << ' ' << (objective[j] >= 0 ? "+" : "") << objective[j] << ' ' << vars[j].name;
    }
    os << ";\n";
    int idx = 0;
    for (const auto& r : rows) {
        os << 'r' << idx++ << ':';
        for (const auto& [j, a] : r.row)
            os << ' ' << (a >= 0 ? "+" : "") << a << ' ' << vars[static_cast<size_t>(j)].name;
        os << (r.sense == RowSense::le ? " <= " : r.sense == RowSense::ge ? " >= " : " = ");
        os << r.rhs << ";\n";
    }
    os << "bin:";
    for (const auto& v : vars)
        if (v.kind == VarKind::binary) os << ' ' << v.name;
    os << ";\n";
    for (const auto& v : vars)
        if (v.kind == VarKind::continuous)
            os << "bounds: " << v.lower << " <= " << v.name << " <= " << v.upper << ";\n";
    return os.str();
}

MilpSolution lp_solve(const MilpModel& model) {
    model.validate();
    Simplex spx(relax(model));
    MilpSolution sol;
    sol.status = spx.solve();
    sol.simplex_pivots = spx.pivots();
    sol.dual_residual = spx.dual_residual();
    if (sol.status == SolveStatus::optimal) {
        sol.assignment = spx.primal();
        sol.objective_value = spx.objective_value();
    }
    return sol;
}

MilpSolution bnb_solve(const MilpModel& model, const LazyCutCallback& lazy_cb,
                       const BnbOptions& options) {
    model.validate();
    const auto t_start = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    struct Node {
        double bound;
        long id;
        std::vector<std::pair<int, int>> fixings;  // binary var -> value
    };
    const auto worse = [](const Node& a, const Node& b) {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.id > b.id;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

    MilpSolution result;
    std::vector<LinearCut> cut_pool;
    double incumbent = -kInf;
    std::vector<double> incumbent_x;
    long next_id = 0;
    open.push({kInf, next_id++, {}});

    bool hit_limit = false;
    while (!open.empty()) {
        if (result.nodes_explored >= options.max_nodes || elapsed() > options.time_limit) {
            hit_limit = true;
            break;
        }
        Node node = open.top();
        open.pop();

        const double gap_tol =
            incumbent_x.empty() ? 0.0 : options.mip_gap * std::max(1.0, std::abs(incumbent));
        if (!incumbent_x.empty() && node.bound <= incumbent + gap_tol)
            break;  // best-first: every open node is within the gap

        ++result.nodes_explored;

        // Re-solve until the lazy callback stops separating this node.
        for (;;) {
            MilpModel sub = model;
            for (const auto& [var, val] : node.fixings) {
                sub.vars[static_cast<size_t>(var)].lower = val;
                sub.vars[static_cast<size_t>(var)].upper = val;
            }
            for (const auto& cut : cut_pool) sub.rows.push_back(cut);

            const MilpSolution lp = lp_solve(sub);
            result.simplex_pivots += lp.simplex_pivots;
            if (lp.status == SolveStatus::unbounded) {
                result.status = SolveStatus::unbounded;
                return result;
            }
            if (lp.status != SolveStatus::optimal) break;  // prune infeasible node
            if (!incumbent_x.empty() && lp.objective_value <= incumbent + gap_tol) break;

            int branch_var = -1;
            double branch_score = options.integrality;
            for (size_t j = 0; j < model.vars.size(); ++j) {
                if (model.vars[j].kind != VarKind::binary) continue;
                const double frac = std::abs(lp.assignment[j] - std::round(lp.assignment[j]));
                if (frac > branch_score) {
                    branch_score = frac;
                    branch_var = static_cast<int>(j);
                }
            }

            if (branch_var == -1) {  // integral point
                if (lazy_cb) {
                    auto cuts = lazy_cb(lp.assignment);
                    if (!cuts.empty()) {
                        for (auto& c : cuts) cut_pool.push_back(std::move(c));
                        result.cuts_added += static_cast<long>(cuts.size());
                        if (elapsed() > options.time_limit) {
                            hit_limit = true;
                            break;
                        }
                        continue;  // re-solve this node against the new cuts
                    }
                }
                if (lp.objective_value > incumbent) {
                    incumbent = lp.objective_value;
                    incumbent_x = lp.assignment;
                }
                break;
            }

            for (int val : {0, 1}) {
                Node child;
                child.bound = lp.objective_value;
                child.id = next_id++;
                child.fixings = node.fixings;
                child.fixings.emplace_back(branch_var, val);
                open.push(std::move(child));
            }
            break;
        }
        if (hit_limit) break;
    }

    if (!incumbent_x.empty()) {
        result.status = hit_limit ? SolveStatus::iteration_limit : SolveStatus::optimal;
        // Round binaries that are within tolerance of a bit.
        for (size_t j = 0; j < model.vars.size(); ++j)
            if (model.vars[j].kind == VarKind::binary)
                incumbent_x[j] = std::round(incumbent_x[j]);
        result.assignment = std::move(incumbent_x);
        result.objective_value = incumbent;
    } else {
        result.status = hit_limit ? SolveStatus::iteration_limit : SolveStatus::infeasible;
    }
    return result;
}

}  // namespace ccb
