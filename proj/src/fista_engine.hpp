#pragma once

// Shared FISTA loop for the omega solvers. The unconstrained and constrained
// fits differ only in the proximal step, so both are thin wrappers around
// fista_minimize with their own ProxStep.

#include "ccmrce/concord.hpp"
#include "ccmrce/types.hpp"

namespace ccmrce::detail {

// Smallest admissible diagonal entry; trial points below are rejected by the
// line search so the log barrier stays finite.
inline constexpr double kDiagFloor = 1e-12;

class ProxStep {
  public:
    virtual ~ProxStep() = default;

    // prox_{step * h2}(A) for the composite nonsmooth part h2. Must return a
    // symmetric matrix whose off-diagonal is feasible.
    virtual SymMatrix apply(const SymMatrix& a, double step) = 0;

    // Called once per outer iteration after the line search accepts the
    // candidate produced by the last apply().
    virtual void accepted() {}

    // h2 evaluated at a feasible iterate (for the reported objective).
    virtual double penalty(const SymMatrix& omega) const = 0;
};

ConcordResult fista_minimize(const SymMatrix& S, const SolverOptions& opts,
                             const SymMatrix& start, ProxStep& prox);

}  // namespace ccmrce::detail
