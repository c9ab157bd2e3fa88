#pragma once

#include "ccmrce/types.hpp"

namespace ccmrce {

// Weighted lasso objective for the B-update:
//   tr((Y - XB)^T (Y - XB) omega^2) / 2 + lambda1 * sum_{jk} |beta_jk|.
double b_objective(const Dataset& data, const CoefMatrix& b, const SymMatrix& omega,
                   double lambda1);

// Gradient of the smooth part: -X^T (Y - XB) omega^2.
Matrix b_smooth_gradient(const Dataset& data, const CoefMatrix& b, const SymMatrix& omega);

struct BUpdateResult {
    CoefMatrix b;
    int sweeps = 0;
    bool converged = false;
    bool ill_posed = false;  // zero X column with lambda1 == 0
};

// Cyclic coordinate descent with closed-form per-entry updates: beta_jk has
// curvature (X^T X)_jj (omega^2)_kk and minimizes a 1-D quadratic plus L1.
// Fixed row-major sweep order; stops when the largest coordinate change is
// <= opts.tol_rel * (1 + max|beta|). Warm-started at b_init.
BUpdateResult b_update(const Dataset& data, const SymMatrix& omega, double lambda1,
                       const CoefMatrix& b_init, const SolverOptions& opts);

}  // namespace ccmrce
