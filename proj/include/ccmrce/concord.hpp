#pragma once

#include <vector>

#include "ccmrce/types.hpp"

namespace ccmrce {

// Result of an omega solve (unconstrained or constrained). The trace records
// the best objective seen up to each iteration (entry 0 is the start value),
// so it is nonincreasing by construction.
struct ConcordResult {
    SymMatrix omega;
    std::vector<double> trace;
    int iterations = 0;
    bool converged = false;
    double min_diag = 0.0;  // smallest diagonal entry over accepted iterates
};

// Smooth part of the pseudolikelihood: -sum_j log omega_jj + tr(S omega^2)/2.
// Requires a strictly positive diagonal.
double concord_smooth(const SymMatrix& omega, const SymMatrix& S);

// Gradient of the smooth part: -omega_D^{-1} + (omega S + S omega)/2.
SymMatrix concord_gradient(const SymMatrix& omega, const SymMatrix& S);

// Off-diagonal L1 over unordered pairs: sum_{j<k} |omega_jk|.
double offdiag_l1_pairs(const SymMatrix& omega);

// Full penalized objective: concord_smooth + lambda2 * sum_{j<k} |omega_jk|.
double concord_objective(const SymMatrix& omega, const SymMatrix& S, double lambda2);

// FISTA with backtracking line search and momentum restart on objective
// increase. The prox step soft-thresholds the off-diagonal (threshold
// step*lambda2/2 per entry, i.e. the pair-counted penalty) and passes the
// diagonal through. warm, when given, overrides the default diagonal start
// diag(1/max(s_jj, 1e-8)).
ConcordResult concord_fit(const SymMatrix& S, double lambda2, const SolverOptions& opts,
                          const SymMatrix* warm = nullptr);

// FISTA momentum recurrence alpha_{t+1} = (1 + sqrt(1 + 4 alpha_t^2)) / 2.
double fista_alpha_next(double alpha);

}  // namespace ccmrce
