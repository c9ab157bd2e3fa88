#pragma once

#include <string>
#include <vector>

#include "ccmrce/constraints.hpp"
#include "ccmrce/types.hpp"

namespace ccmrce {

// Joint fit output. objective_trace holds the full objective after each outer
// iteration (entry 0 is the starting point) and is nonincreasing.
struct FitResult {
    CoefMatrix B;
    SymMatrix omega;
    std::vector<double> objective_trace;
    int outer_iters = 0;
    bool converged = false;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::string constraint_id = "none";
    double min_omega_diag = 0.0;  // smallest diagonal over accepted omega iterates
    std::string error;            // set by grid_sweep when a cell fails
};

// Outer alternation controls. Subproblems (omega FISTA, B coordinate descent)
// run at a 10x tighter tolerance than tol_rel so the alternating descent
// invariant stays testable.
struct AltOptions {
    int max_outer_iter = 100;
    double tol_rel = 1e-6;
    SolverOptions solver;

    SolverOptions subproblem_options() const;
};

// Empirical residual covariance S = (Y - XB)^T (Y - XB) / n.
SymMatrix residual_cov(const Dataset& data, const CoefMatrix& b);

// Full objective of the joint problem:
//   -n sum_j log omega_jj + tr((Y-XB)^T (Y-XB) omega^2)/2
//   + lambda1 ||B||_1 + n lambda2 sum_{j<k} |omega_jk|,
// +infinity when constraint is given and the off-diagonal of omega violates
// it. Equals n * cconcord_objective(omega, residual_cov(data, b), lambda2, C)
// + lambda1 ||B||_1.
double full_objective(const Dataset& data, const CoefMatrix& b, const SymMatrix& omega,
                      double lambda1, double lambda2,
                      const ConvexConstraint* constraint = nullptr);

// CONCORD-MRCE: alternate S -> omega (concord_fit) -> B (b_update) from
// B = 0 until the relative change of the full objective is <= tol_rel.
FitResult fit_concord_mrce(const Dataset& data, double lambda1, double lambda2,
                           const AltOptions& opts);

// CC-MRCE: same alternation with the constrained omega update; the final
// omega (and every accepted iterate) is feasible exactly.
FitResult fit_cc_mrce(const Dataset& data, double lambda1, double lambda2,
                      const ConvexConstraint& constraint, const AltOptions& opts);

}  // namespace ccmrce
