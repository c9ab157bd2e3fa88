#include "ccmrce/prox.hpp"

#include <cmath>
#include <stdexcept>

#include "ccmrce/concord.hpp"

namespace ccmrce {

namespace {

Matrix offdiag(const SymMatrix& m) {
    Matrix x = m.mat();
    x.diagonal().setZero();
    return x;
}

// g1 on raw matrices; valid for any closed convex C via the Moreau envelope.
double dual_objective_raw(const Matrix& h, const Matrix& a_x, const ProxProblem& prob) {
    const Matrix v = a_x - (prob.gamma * prob.lambda2) * h;
    const Matrix proj = prob.constraint->project(v);
    return v.squaredNorm() - (v - proj).squaredNorm();
}

Matrix dual_gradient_raw(const Matrix& h, const Matrix& a_x, const ProxProblem& prob) {
    const Matrix v = a_x - (prob.gamma * prob.lambda2) * h;
    Matrix g = (-2.0 * prob.gamma * prob.lambda2) * prob.constraint->project(v);
    g.diagonal().setZero();
    return g;
}

}  // namespace

void ProxProblem::validate() const {
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("ProxProblem: gamma must be positive");
    }
    if (lambda2 < 0.0) {
        throw std::invalid_argument("ProxProblem: lambda2 must be nonnegative");
    }
    if (!constraint) {
        throw std::invalid_argument("ProxProblem: constraint must be set");
    }
    if (constraint->dim() != a.dim()) {
        throw std::invalid_argument("ProxProblem: constraint dimension mismatch");
    }
}

double dual_objective(const SymMatrix& h, const ProxProblem& prob) {
    prob.validate();
    Matrix hx = h.mat();
    hx.diagonal().setZero();
    return dual_objective_raw(hx, offdiag(prob.a), prob);
}

SymMatrix dual_gradient(const SymMatrix& h, const ProxProblem& prob) {
    prob.validate();
    Matrix hx = h.mat();
    hx.diagonal().setZero();
    return SymMatrix(dual_gradient_raw(hx, offdiag(prob.a), prob));
}

DualResult solve_dual(const ProxProblem& prob, const SolverOptions& opts, const SymMatrix* warm) {
    prob.validate();
    opts.validate();

    const Matrix a_x = offdiag(prob.a);
    const Index p = prob.a.dim();

    if (prob.lambda2 == 0.0) {
        // g1 is constant in H; any feasible point is optimal. Return 0.
        DualResult res;
        res.h = SymMatrix::zero(p);
        res.trace.push_back(dual_objective_raw(Matrix::Zero(p, p), a_x, prob));
        res.converged = true;
        return res;
    }

    Matrix h = warm ? linf_ball_project(warm->mat()) : Matrix::Zero(p, p);
    h.diagonal().setZero();
    Matrix h_prev = h;

    DualResult res;
    double f_cur = dual_objective_raw(h, a_x, prob);
    double best_f = f_cur;
    Matrix best_h = h;
    res.trace.push_back(best_f);

    const double constant_step = 1.0 / (2.0 * prob.lambda2 * prob.lambda2 * prob.gamma * prob.gamma);
    double step = opts.dual_constant_step ? constant_step : opts.dual_initial_step;
    const double c = opts.dual_backtrack_factor;
    double alpha = 1.0;

    for (int t = 1; t <= opts.max_inner_iter; ++t) {
        double alpha_next = fista_alpha_next(alpha);
        Matrix theta = h + ((alpha - 1.0) / alpha_next) * (h - h_prev);
        const Matrix grad = dual_gradient_raw(theta, a_x, prob);
        const double f_theta = dual_objective_raw(theta, a_x, prob);

        Matrix cand;
        double f_cand = 0.0;
        if (opts.dual_constant_step) {
            cand = linf_ball_project(theta - constant_step * grad);
            cand.diagonal().setZero();
            f_cand = dual_objective_raw(cand, a_x, prob);
        } else {
            bool accepted = false;
            while (step > 1e-18) {
                cand = linf_ball_project(theta - step * grad);
                cand.diagonal().setZero();
                f_cand = dual_objective_raw(cand, a_x, prob);
                const Matrix diff = cand - theta;
                const double model = f_theta + grad.cwiseProduct(diff).sum() +
                                     diff.squaredNorm() / (2.0 * step);
                if (f_cand <= model + 1e-12 * (1.0 + std::abs(f_theta))) {
                    accepted = true;
                    break;
                }
                step *= c;
            }
            if (!accepted) {
                res.iterations = t;
                break;
            }
        }

        h_prev = h;
        h = cand;
        const double f_prev = f_cur;
        f_cur = f_cand;
        const bool increased = f_cur > f_prev + 1e-14 * (1.0 + std::abs(f_prev));
        if (f_cur < best_f) {
            best_f = f_cur;
            best_h = h;
        }
        res.trace.push_back(best_f);
        res.iterations = t;

        if (!increased &&
            std::abs(f_cur - f_prev) <= opts.tol_dual * (1.0 + std::abs(f_prev))) {
            res.converged = true;
            break;
        }
        alpha = increased ? 1.0 : alpha_next;
        if (!opts.dual_constant_step) {
            step /= c;
            if (step > 1e12) step = 1e12;
        }
    }

    res.h = SymMatrix(std::move(best_h));
    return res;
}

ProxResult constrained_prox(const ProxProblem& prob, const SolverOptions& opts,
                            const SymMatrix* warm) {
    prob.validate();
    ProxResult res;
    const auto [a_d, a_x] = split_diag(prob.a);

    if (prob.lambda2 == 0.0) {
        // Dual parameterization degenerates; the prox is a pure projection.
        res.omega = SymMatrix(prob.constraint->project(a_x.mat()) + a_d.mat());
        res.h = SymMatrix::zero(prob.a.dim());
        return res;
    }

    DualResult dual = solve_dual(prob, opts, warm);
    const Matrix v = a_x.mat() - (prob.gamma * prob.lambda2) * dual.h.mat();
    res.omega = SymMatrix(prob.constraint->project(v) + a_d.mat());
    res.h = dual.h;
    res.dual_iterations = dual.iterations;
    res.dual_converged = dual.converged;
    return res;
}

}  // namespace ccmrce
