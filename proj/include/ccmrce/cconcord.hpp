#pragma once

#include "ccmrce/concord.hpp"
#include "ccmrce/constraints.hpp"
#include "ccmrce/types.hpp"

namespace ccmrce {

// Constrained pseudolikelihood objective: concord_objective when the
// off-diagonal of omega lies in C, +infinity otherwise.
double cconcord_objective(const SymMatrix& omega, const SymMatrix& S, double lambda2,
                          const ConvexConstraint& constraint);

// Constrained-CONCORD: outer FISTA identical to concord_fit except that the
// proximal step evaluates the constrained prox (dual box solve, gamma =
// step/2). Every accepted iterate is feasible exactly. dual_warm, when given,
// carries the dual variable across calls (in/out) so alternating outer loops
// can warm-start the inner solver.
ConcordResult cconcord_fit(const SymMatrix& S, double lambda2, const ConvexConstraint& constraint,
                           const SolverOptions& opts, const SymMatrix* warm = nullptr,
                           SymMatrix* dual_warm = nullptr);

}  // namespace ccmrce
