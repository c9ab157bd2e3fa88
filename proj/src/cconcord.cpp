#include "ccmrce/cconcord.hpp"

#include <limits>
#include <stdexcept>

#include "ccmrce/prox.hpp"
#include "fista_engine.hpp"

namespace ccmrce {

double cconcord_objective(const SymMatrix& omega, const SymMatrix& S, double lambda2,
                          const ConvexConstraint& constraint) {
    if (omega.dim() != constraint.dim()) {
        throw std::invalid_argument("cconcord_objective: constraint dimension mismatch");
    }
    Matrix off = omega.mat();
    off.diagonal().setZero();
    if (!constraint.contains(off)) {
        // Still reject a nonpositive diagonal before reporting infeasibility.
        if (omega.min_diagonal() <= 0.0) {
            throw std::domain_error("cconcord_objective: diagonal of omega must be strictly positive");
        }
        return std::numeric_limits<double>::infinity();
    }
    return concord_objective(omega, S, lambda2);
}

namespace {

class ConstrainedProxStep final : public detail::ProxStep {
  public:
    ConstrainedProxStep(const ConvexConstraint& constraint, double lambda2,
                        const SolverOptions& opts, SymMatrix* dual_warm)
        : constraint_(constraint), lambda2_(lambda2), opts_(opts), dual_warm_(dual_warm) {
        h_accepted_ = dual_warm_ ? *dual_warm_ : SymMatrix::zero(constraint.dim());
    }

    SymMatrix apply(const SymMatrix& a, double step) override {
        // gamma = step/2 pairs the prox scale with the gradient step so fixed
        // points of the iteration minimize the pair-counted objective.
        ProxProblem prob{a, 0.5 * step, lambda2_, &constraint_};
        ProxResult res = constrained_prox(prob, opts_, &h_accepted_);
        h_pending_ = res.h;
        return res.omega;
    }

    void accepted() override {
        // Warm start the next outer iteration's dual solves from the dual
        // variable of the accepted step, not from rejected trials.
        h_accepted_ = h_pending_;
        if (dual_warm_) *dual_warm_ = h_accepted_;
    }

    double penalty(const SymMatrix& omega) const override {
        return lambda2_ * offdiag_l1_pairs(omega);
    }

  private:
    const ConvexConstraint& constraint_;
    double lambda2_;
    const SolverOptions& opts_;
    SymMatrix* dual_warm_;
    SymMatrix h_accepted_;
    SymMatrix h_pending_;
};

}  // namespace

ConcordResult cconcord_fit(const SymMatrix& S, double lambda2, const ConvexConstraint& constraint,
                           const SolverOptions& opts, const SymMatrix* warm,
                           SymMatrix* dual_warm) {
    if (lambda2 < 0.0) {
        throw std::invalid_argument("cconcord_fit: lambda2 must be nonnegative");
    }
    if (S.dim() != constraint.dim()) {
        throw std::invalid_argument("cconcord_fit: constraint dimension mismatch");
    }

    SymMatrix start;
    if (warm) {
        if (warm->min_diagonal() <= 0.0) {
            throw std::domain_error("cconcord_fit: warm start diagonal must be strictly positive");
        }
        // Feasible start: project the off-diagonal, keep the diagonal.
        Matrix off = warm->mat();
        off.diagonal().setZero();
        Matrix s = constraint.project(off);
        s.diagonal() = warm->diagonal();
        start = SymMatrix(std::move(s));
    } else {
        Vector d = S.diagonal().cwiseMax(1e-8).cwiseInverse();
        start = SymMatrix::from_diagonal(d);
    }

    ConstrainedProxStep prox(constraint, lambda2, opts, dual_warm);
    return detail::fista_minimize(S, opts, start, prox);
}

}  // namespace ccmrce
