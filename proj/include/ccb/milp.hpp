#pragma once
// Self-contained mixed binary linear programming: a bounded-variable
// primal simplex for the LP relaxations, best-first branch-and-bound over
// the binary variables, and a lazy-cut callback invoked at integer nodes
// (the hook used by the outer-approximation loops).
//
// One solve is one isolated state machine; distinct solves may run on
// distinct threads.  The lazy callback runs synchronously on the solving
// thread.

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ccb {

enum class VarKind { binary, continuous };  // continuous vars live in [lower, upper]

struct MilpVariable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;  // binaries are {0,1}; continuous lower must be finite
    double upper = 1.0;  // may be +inf for continuous
};

enum class RowSense { le, ge, eq };
enum class CutOrigin { budget, outer_approx, bound_link };

struct LinearCut {
    std::map<int, double> row;  // variable index -> coefficient, sparse
    RowSense sense = RowSense::le;
    double rhs = 0.0;
    CutOrigin origin = CutOrigin::budget;
};

struct MilpModel {
    std::vector<double> objective;  // maximized
    std::vector<MilpVariable> vars;
    std::vector<LinearCut> rows;

    int add_binary(const std::string& name, double obj);
    int add_continuous(const std::string& name, double obj, double lo, double up);
    void add_row(LinearCut cut);
    void validate() const;  // throws std::invalid_argument on malformed input

    // Plain-text dump (LP-style; grammar documented in docs/lp_format.md).
    std::string to_lp_string() const;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

struct MilpSolution {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> assignment;
    double objective_value = 0.0;
    long nodes_explored = 0;
    long cuts_added = 0;     // rows appended by the lazy callback
    long simplex_pivots = 0;
    double dual_residual = 0.0;  // max improving reduced cost at termination
};

struct BnbOptions {
    double mip_gap = 1e-5;        // relative gap at termination
    double integrality = 1e-8;    // |x - round(x)| tolerance
    double feasibility = 1e-7;    // row violation tolerance
    long max_nodes = 50'000'000;
    double time_limit = 1e30;     // seconds
};

// Solves the continuous relaxation (binaries in [0,1]).  Optimality means
// no improving reduced cost at tolerance 1e-9; unbounded models are
// reported distinctly.
MilpSolution lp_solve(const MilpModel& model);

// Called at every node whose LP optimum is integral; returning an empty
// vector accepts the point as incumbent, otherwise the cuts join the
// global pool and the node is re-solved.
using LazyCutCallback = std::function<std::vector<LinearCut>(const std::vector<double>&)>;

MilpSolution bnb_solve(const MilpModel& model, const LazyCutCallback& lazy_cb = nullptr,
                       const BnbOptions& options = {});

}  // namespace ccb
