#pragma once

#include <vector>

#include "ccmrce/constraints.hpp"
#include "ccmrce/types.hpp"

namespace ccmrce {

// One evaluation of the constrained proximal operator
//   prox(A) = argmin_{omega_X in C} ||omega_X - A_X||_F^2 / (2 gamma)
//             + lambda2 ||omega_X||_1,      omega = omega_X + A_D,
// solved through the dual box problem
//   min_{||H_X||_inf <= 1} g1(H_X),
//   g1(H_X) = ||A_X - gamma lambda2 H_X||_F^2
//           - ||P_{C perp}(A_X - gamma lambda2 H_X)||_F^2,
// with the primal recovered as omega_X = P_C(A_X - gamma lambda2 H_X).
struct ProxProblem {
    SymMatrix a;                          // gradient-step point
    double gamma = 0.0;                   // prox scale, > 0
    double lambda2 = 0.0;                 // L1 weight, >= 0
    const ConvexConstraint* constraint = nullptr;

    void validate() const;
};

// g1 evaluated at H_X (diagonal of h ignored; treated as zero).
double dual_objective(const SymMatrix& h, const ProxProblem& prob);

// grad g1 = -2 gamma lambda2 P_C(A_X - gamma lambda2 H_X); zero diagonal.
SymMatrix dual_gradient(const SymMatrix& h, const ProxProblem& prob);

struct DualResult {
    SymMatrix h;
    std::vector<double> trace;  // best dual objective per iteration
    int iterations = 0;
    bool converged = false;
};

// Inner FISTA over the L-infinity box, prox = entrywise clamp to [-1, 1].
// Backtracking by default; opts.dual_constant_step switches to the fixed step
// 1/(2 lambda2^2 gamma^2) implied by the Lipschitz bound L(g1) <= 2 lambda2^2
// gamma^2. warm, when given, is projected into the box and used as H^(0);
// the default start is 0. lambda2 == 0 makes g1 constant and returns H = 0.
DualResult solve_dual(const ProxProblem& prob, const SolverOptions& opts,
                      const SymMatrix* warm = nullptr);

struct ProxResult {
    SymMatrix omega;            // P_C(A_X - gamma lambda2 H*) + A_D
    SymMatrix h;                // dual solution (zero for lambda2 == 0)
    int dual_iterations = 0;
    bool dual_converged = true;
};

// Evaluates the constrained prox. lambda2 == 0 skips the dual entirely and
// returns P_C(A_X) + A_D.
ProxResult constrained_prox(const ProxProblem& prob, const SolverOptions& opts,
                            const SymMatrix* warm = nullptr);

}  // namespace ccmrce
