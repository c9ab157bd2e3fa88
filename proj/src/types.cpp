#include "ccmrce/types.hpp"

#include <cmath>
#include <stdexcept>

#include "ccmrce/errors.hpp"

namespace ccmrce {

namespace {

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": entries must be finite");
    }
}

}  // namespace

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw std::invalid_argument("SymMatrix: matrix must be square");
    }
    require_finite(m_, "SymMatrix");
    for (Index j = 0; j < m_.rows(); ++j) {
        for (Index k = j + 1; k < m_.cols(); ++k) {
            if (m_(j, k) != m_(k, j)) {
                throw std::invalid_argument("SymMatrix: matrix must be exactly symmetric");
            }
        }
    }
}

SymMatrix SymMatrix::zero(Index p) {
    SymMatrix s;
    s.m_ = Matrix::Zero(p, p);
    return s;
}

SymMatrix SymMatrix::identity(Index p) {
    SymMatrix s;
    s.m_ = Matrix::Identity(p, p);
    return s;
}

SymMatrix SymMatrix::from_diagonal(const Vector& d) {
    SymMatrix s;
    s.m_ = d.asDiagonal();
    require_finite(s.m_, "SymMatrix");
    return s;
}

SymMatrix SymMatrix::from_symmetrized(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("SymMatrix: matrix must be square");
    }
    SymMatrix s;
    s.m_.resize(m.rows(), m.cols());
    for (Index j = 0; j < m.rows(); ++j) {
        s.m_(j, j) = m(j, j);
        for (Index k = j + 1; k < m.cols(); ++k) {
            const double v = 0.5 * (m(j, k) + m(k, j));
            s.m_(j, k) = v;
            s.m_(k, j) = v;
        }
    }
    require_finite(s.m_, "SymMatrix");
    return s;
}

void SymMatrix::set(Index i, Index j, double v) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument("SymMatrix::set: value must be finite");
    }
    m_(i, j) = v;
    m_(j, i) = v;
}

Dataset::Dataset(Matrix x, Matrix y) : X(std::move(x)), Y(std::move(y)) {
    if (X.rows() != Y.rows()) {
        throw DataError("Dataset: X and Y must have the same number of rows");
    }
    if (X.rows() < 1) {
        throw DataError("Dataset: at least one sample required");
    }
}

void SolverOptions::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw std::invalid_argument(std::string("SolverOptions: ") + name + " must be positive");
        }
    };
    if (max_outer_iter <= 0 || max_inner_iter <= 0) {
        throw std::invalid_argument("SolverOptions: iteration caps must be positive");
    }
    positive(tol_rel, "tol_rel");
    positive(tol_dual, "tol_dual");
    positive(initial_step, "initial_step");
    positive(dual_initial_step, "dual_initial_step");
    if (initial_step > 1.0) {
        throw std::invalid_argument("SolverOptions: initial_step must be in (0, 1]");
    }
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0) ||
        !(dual_backtrack_factor > 0.0 && dual_backtrack_factor < 1.0)) {
        throw std::invalid_argument("SolverOptions: backtrack factors must be in (0, 1)");
    }
}

std::pair<SymMatrix, SymMatrix> split_diag(const SymMatrix& m) {
    Matrix d = Matrix::Zero(m.dim(), m.dim());
    d.diagonal() = m.mat().diagonal();
    Matrix x = m.mat();
    x.diagonal().setZero();
    return {SymMatrix(std::move(d)), SymMatrix(std::move(x))};
}

Matrix soft_threshold(const Matrix& m, double t) {
    if (t < 0.0) {
        throw std::invalid_argument("soft_threshold: threshold must be nonnegative");
    }
    return m.unaryExpr([t](double v) {
        const double shrunk = std::abs(v) - t;
        return shrunk > 0.0 ? (v > 0.0 ? shrunk : -shrunk) : 0.0;
    });
}

SymMatrix soft_threshold(const SymMatrix& m, double t) {
    return SymMatrix(soft_threshold(m.mat(), t));
}

double frob_norm_sq(const Matrix& m) { return m.squaredNorm(); }

}  // namespace ccmrce
