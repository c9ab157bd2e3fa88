#include "ccmrce/concord.hpp"

#include <cmath>
#include <stdexcept>

#include "fista_engine.hpp"

namespace ccmrce {

namespace {

void require_positive_diagonal(const SymMatrix& omega, const char* what) {
    if (omega.min_diagonal() <= 0.0) {
        throw std::domain_error(std::string(what) + ": diagonal of omega must be strictly positive");
    }
}

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

}  // namespace

double concord_smooth(const SymMatrix& omega, const SymMatrix& S) {
    require_positive_diagonal(omega, "concord_smooth");
    require_same_dim(omega, S, "concord_smooth");
    // tr(S omega^2) = <omega S, omega> for symmetric arguments.
    const Matrix os = omega.mat() * S.mat();
    const double quad = os.cwiseProduct(omega.mat()).sum();
    return -omega.diagonal().array().log().sum() + 0.5 * quad;
}

SymMatrix concord_gradient(const SymMatrix& omega, const SymMatrix& S) {
    require_positive_diagonal(omega, "concord_gradient");
    require_same_dim(omega, S, "concord_gradient");
    const Matrix os = omega.mat() * S.mat();
    Matrix g = 0.5 * (os + os.transpose());
    g.diagonal() -= omega.diagonal().cwiseInverse();
    return SymMatrix::from_symmetrized(g);
}

double offdiag_l1_pairs(const SymMatrix& omega) {
    double sum = 0.0;
    for (Index j = 0; j < omega.dim(); ++j) {
        for (Index k = j + 1; k < omega.dim(); ++k) {
            sum += std::abs(omega(j, k));
        }
    }
    return sum;
}

double concord_objective(const SymMatrix& omega, const SymMatrix& S, double lambda2) {
    if (lambda2 < 0.0) {
        throw std::invalid_argument("concord_objective: lambda2 must be nonnegative");
    }
    return concord_smooth(omega, S) + lambda2 * offdiag_l1_pairs(omega);
}

double fista_alpha_next(double alpha) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha)); }

namespace detail {

ConcordResult fista_minimize(const SymMatrix& S, const SolverOptions& opts,
                             const SymMatrix& start, ProxStep& prox) {
    opts.validate();

    ConcordResult res;
    SymMatrix omega = start;
    SymMatrix omega_prev = omega;

    auto objective = [&](const SymMatrix& w, double smooth) { return smooth + prox.penalty(w); };

    double f_cur = objective(omega, concord_smooth(omega, S));
    double best_f = f_cur;
    res.omega = omega;
    res.trace.push_back(best_f);
    res.min_diag = omega.min_diagonal();

    double alpha = 1.0;
    double step = opts.initial_step;
    const double c = opts.backtrack_factor;

    for (int t = 1; t <= opts.max_outer_iter; ++t) {
        double alpha_next = fista_alpha_next(alpha);
        Matrix theta_raw =
            omega.mat() + ((alpha - 1.0) / alpha_next) * (omega.mat() - omega_prev.mat());
        if (theta_raw.diagonal().minCoeff() <= kDiagFloor) {
            // Extrapolation left the domain of the log barrier; restart momentum.
            alpha = 1.0;
            alpha_next = fista_alpha_next(alpha);
            theta_raw = omega.mat();
        }
        const SymMatrix theta(std::move(theta_raw));
        const SymMatrix grad = concord_gradient(theta, S);
        const double h1_theta = concord_smooth(theta, S);

        SymMatrix cand;
        double h1_cand = 0.0;
        bool accepted = false;
        while (step > 1e-16 * opts.initial_step) {
            const SymMatrix a(theta.mat() - step * grad.mat());
            cand = prox.apply(a, step);
            if (cand.min_diagonal() > kDiagFloor) {
                h1_cand = concord_smooth(cand, S);
                const Matrix diff = cand.mat() - theta.mat();
                const double model = h1_theta + grad.mat().cwiseProduct(diff).sum() +
                                     diff.squaredNorm() / (2.0 * step);
                if (h1_cand <= model + 1e-12 * (1.0 + std::abs(h1_theta))) {
                    accepted = true;
                    break;
                }
            }
            step *= c;
        }
        if (!accepted) {
            // Step length collapsed; keep the best iterate found so far.
            res.converged = false;
            res.iterations = t;
            return res;
        }
        prox.accepted();

        omega_prev = omega;
        omega = cand;
        const double f_new = objective(omega, h1_cand);
        const bool increased = f_new > f_cur + 1e-12 * (1.0 + std::abs(f_cur));
        const double f_prev = f_cur;
        f_cur = f_new;

        if (f_new < best_f) {
            best_f = f_new;
            res.omega = omega;
        }
        res.trace.push_back(best_f);
        res.min_diag = std::min(res.min_diag, omega.min_diagonal());
        res.iterations = t;

        if (!increased &&
            std::abs(f_new - f_prev) <= opts.tol_rel * (1.0 + std::abs(f_prev))) {
            res.converged = true;
            return res;
        }

        alpha = increased ? 1.0 : alpha_next;
        step /= c;  // gentle growth of the trial step
        if (step > 1e12) step = 1e12;
    }
    return res;
}

}  // namespace detail

namespace {

class SoftThresholdProx final : public detail::ProxStep {
  public:
    explicit SoftThresholdProx(double lambda2) : lambda2_(lambda2) {}

    SymMatrix apply(const SymMatrix& a, double step) override {
        // Pair-counted L1 on the off-diagonal: threshold step*lambda2/2 per
        // entry; diagonal passes through untouched.
        Matrix out = soft_threshold(a.mat(), 0.5 * step * lambda2_);
        out.diagonal() = a.diagonal();
        return SymMatrix(std::move(out));
    }

    double penalty(const SymMatrix& omega) const override {
        return lambda2_ * offdiag_l1_pairs(omega);
    }

  private:
    double lambda2_;
};

}  // namespace

ConcordResult concord_fit(const SymMatrix& S, double lambda2, const SolverOptions& opts,
                          const SymMatrix* warm) {
    if (lambda2 < 0.0) {
        throw std::invalid_argument("concord_fit: lambda2 must be nonnegative");
    }
    SoftThresholdProx prox(lambda2);
    SymMatrix start;
    if (warm) {
        require_positive_diagonal(*warm, "concord_fit(warm)");
        start = *warm;
    } else {
        Vector d = S.diagonal().cwiseMax(1e-8).cwiseInverse();
        start = SymMatrix::from_diagonal(d);
    }
    return detail::fista_minimize(S, opts, start, prox);
}

}  // namespace ccmrce
