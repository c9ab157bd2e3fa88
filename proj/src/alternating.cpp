#include "ccmrce/alternating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccmrce/cconcord.hpp"
#include "ccmrce/concord.hpp"
#include "ccmrce/errors.hpp"
#include "ccmrce/regression.hpp"

namespace ccmrce {

SolverOptions AltOptions::subproblem_options() const {
    SolverOptions sub = solver;
    sub.tol_rel = std::min(solver.tol_rel, 0.1 * tol_rel);
    return sub;
}

SymMatrix residual_cov(const Dataset& data, const CoefMatrix& b) {
    if (b.rows() != data.p() || b.cols() != data.q()) {
        throw std::invalid_argument("residual_cov: B must be p x q");
    }
    const Matrix r = data.Y - data.X * b;
    return SymMatrix::from_symmetrized((r.transpose() * r) / static_cast<double>(data.n()));
}

double full_objective(const Dataset& data, const CoefMatrix& b, const SymMatrix& omega,
                      double lambda1, double lambda2, const ConvexConstraint* constraint) {
    if (b.rows() != data.p() || b.cols() != data.q() || omega.dim() != data.q()) {
        throw std::invalid_argument("full_objective: dimension mismatch");
    }
    if (omega.min_diagonal() <= 0.0) {
        throw std::domain_error("full_objective: diagonal of omega must be strictly positive");
    }
    if (constraint) {
        Matrix off = omega.mat();
        off.diagonal().setZero();
        if (!constraint->contains(off)) return std::numeric_limits<double>::infinity();
    }
    const double n = static_cast<double>(data.n());
    const Matrix r = data.Y - data.X * b;
    return -n * omega.diagonal().array().log().sum() + 0.5 * (r * omega.mat()).squaredNorm() +
           lambda1 * b.cwiseAbs().sum() + n * lambda2 * offdiag_l1_pairs(omega);
}

namespace {

FitResult fit_alternating(const Dataset& data, double lambda1, double lambda2,
                          const ConvexConstraint* constraint, const AltOptions& opts) {
    if (lambda1 < 0.0 || lambda2 < 0.0) {
        throw std::invalid_argument("fit: penalties must be nonnegative");
    }
    if (data.n() < 2) {
        throw DataError("fit: at least two samples required");
    }
    if (constraint && constraint->dim() != data.q()) {
        throw DataError("fit: constraint dimension must match the response dimension");
    }
    if (opts.max_outer_iter <= 0 || !(opts.tol_rel > 0.0)) {
        throw std::invalid_argument("fit: outer iteration cap and tolerance must be positive");
    }
    const SolverOptions sub = opts.subproblem_options();
    sub.validate();

    FitResult res;
    res.lambda1 = lambda1;
    res.lambda2 = lambda2;
    res.constraint_id = constraint ? constraint->describe() : "none";

    res.B = CoefMatrix::Zero(data.p(), data.q());
    SymMatrix s = residual_cov(data, res.B);
    res.omega = SymMatrix::from_diagonal(s.diagonal().cwiseMax(1e-8).cwiseInverse());
    res.min_omega_diag = res.omega.min_diagonal();

    SymMatrix dual_warm = SymMatrix::zero(data.q());
    double f = full_objective(data, res.B, res.omega, lambda1, lambda2, constraint);
    res.objective_trace.push_back(f);

    for (int t = 1; t <= opts.max_outer_iter; ++t) {
        s = residual_cov(data, res.B);

        ConcordResult omega_fit;
        if (constraint) {
            omega_fit = cconcord_fit(s, lambda2, *constraint, sub, &res.omega, &dual_warm);
        } else {
            omega_fit = concord_fit(s, lambda2, sub, &res.omega);
        }
        res.omega = omega_fit.omega;
        res.min_omega_diag = std::min(res.min_omega_diag, omega_fit.min_diag);

        res.B = b_update(data, res.omega, lambda1, res.B, sub).b;

        const double f_prev = f;
        f = full_objective(data, res.B, res.omega, lambda1, lambda2, constraint);
        res.objective_trace.push_back(f);
        res.outer_iters = t;

        if (std::abs(f - f_prev) <= opts.tol_rel * (1.0 + std::abs(f_prev))) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace

FitResult fit_concord_mrce(const Dataset& data, double lambda1, double lambda2,
                           const AltOptions& opts) {
    return fit_alternating(data, lambda1, lambda2, nullptr, opts);
}

FitResult fit_cc_mrce(const Dataset& data, double lambda1, double lambda2,
                      const ConvexConstraint& constraint, const AltOptions& opts) {
    return fit_alternating(data, lambda1, lambda2, &constraint, opts);
}

}  // namespace ccmrce
