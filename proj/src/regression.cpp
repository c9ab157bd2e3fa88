#include "ccmrce/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace ccmrce {

namespace {

void check_dims(const Dataset& data, const CoefMatrix& b, const SymMatrix& omega,
                const char* what) {
    if (b.rows() != data.p() || b.cols() != data.q()) {
        throw std::invalid_argument(std::string(what) + ": B must be p x q");
    }
    if (omega.dim() != data.q()) {
        throw std::invalid_argument(std::string(what) + ": omega must be q x q");
    }
}

double soft(double v, double t) {
    const double s = std::abs(v) - t;
    return s > 0.0 ? (v > 0.0 ? s : -s) : 0.0;
}

}  // namespace

double b_objective(const Dataset& data, const CoefMatrix& b, const SymMatrix& omega,
                   double lambda1) {
    check_dims(data, b, omega, "b_objective");
    if (lambda1 < 0.0) {
        throw std::invalid_argument("b_objective: lambda1 must be nonnegative");
    }
    const Matrix r = data.Y - data.X * b;
    // tr(R^T R omega^2) = ||R omega||_F^2 for symmetric omega.
    return 0.5 * (r * omega.mat()).squaredNorm() + lambda1 * b.cwiseAbs().sum();
}

Matrix b_smooth_gradient(const Dataset& data, const CoefMatrix& b, const SymMatrix& omega) {
    check_dims(data, b, omega, "b_smooth_gradient");
    const Matrix r = data.Y - data.X * b;
    return -data.X.transpose() * r * (omega.mat() * omega.mat());
}

BUpdateResult b_update(const Dataset& data, const SymMatrix& omega, double lambda1,
                       const CoefMatrix& b_init, const SolverOptions& opts) {
    check_dims(data, b_init, omega, "b_update");
    if (lambda1 < 0.0) {
        throw std::invalid_argument("b_update: lambda1 must be nonnegative");
    }
    opts.validate();

    const Index p = data.p();
    const Index q = data.q();
    const Matrix xtx = data.X.transpose() * data.X;
    const Matrix quad = omega.mat() * omega.mat();  // omega^2, PSD with positive diagonal

    BUpdateResult res;
    res.b = b_init;
    // t = X^T (Y - XB), maintained across coordinate updates.
    Matrix t = data.X.transpose() * data.Y - xtx * res.b;

    for (int sweep = 1; sweep <= opts.max_outer_iter; ++sweep) {
        double max_change = 0.0;
        double max_abs_b = 0.0;
        for (Index j = 0; j < p; ++j) {
            for (Index k = 0; k < q; ++k) {
                const double curv = xtx(j, j) * quad(k, k);
                const double old = res.b(j, k);
                double next;
                if (curv <= 0.0) {
                    if (lambda1 > 0.0) {
                        next = 0.0;  // objective reduces to lambda1 |beta|
                    } else {
                        res.ill_posed = true;
                        next = old;  // coefficient not identifiable, leave at init
                    }
                } else {
                    const double u = t.row(j).dot(quad.col(k)) + curv * old;
                    next = soft(u, lambda1) / curv;
                }
                const double delta = next - old;
                if (delta != 0.0) {
                    res.b(j, k) = next;
                    t.col(k).noalias() -= xtx.col(j) * delta;
                }
                max_change = std::max(max_change, std::abs(delta));
                max_abs_b = std::max(max_abs_b, std::abs(next));
            }
        }
        res.sweeps = sweep;
        if (max_change <= opts.tol_rel * (1.0 + max_abs_b)) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace ccmrce
