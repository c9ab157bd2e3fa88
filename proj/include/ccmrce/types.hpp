#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace ccmrce {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Regression coefficient matrices (p x q) are plain dense matrices; only the
// symmetric carriers get a dedicated type because exact symmetry is an
// invariant the solvers rely on.
using CoefMatrix = Matrix;

// Dense symmetric matrix. Symmetry holds exactly (bit-equal halves): writes go
// through set(), constructors reject or repair asymmetric input, and all
// entries are finite.
class SymMatrix {
  public:
    SymMatrix() = default;

    // Requires m exactly symmetric and finite.
    explicit SymMatrix(Matrix m);

    static SymMatrix zero(Index p);
    static SymMatrix identity(Index p);
    static SymMatrix from_diagonal(const Vector& d);

    // Symmetric part (m + m^T)/2, written once per unordered pair so the
    // result is exactly symmetric even when m is only symmetric up to
    // rounding (e.g. products of symmetric factors).
    static SymMatrix from_symmetrized(const Matrix& m);

    Index dim() const { return m_.rows(); }
    double operator()(Index i, Index j) const { return m_(i, j); }

    // Symmetric write.
    void set(Index i, Index j, double v);

    const Matrix& mat() const { return m_; }
    Vector diagonal() const { return m_.diagonal(); }
    double min_diagonal() const { return m_.diagonal().minCoeff(); }

    bool operator==(const SymMatrix& o) const { return m_ == o.m_; }

  private:
    Matrix m_;
};

// Paired sample matrices: X is n x p (predictors), Y is n x q (responses).
struct Dataset {
    Matrix X;
    Matrix Y;

    Dataset() = default;
    Dataset(Matrix x, Matrix y);  // validates matching row counts, n >= 1

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }
    Index q() const { return Y.cols(); }
};

// Controls for the FISTA solvers (outer omega updates and the inner dual).
struct SolverOptions {
    int max_outer_iter = 3000;          // outer FISTA iteration cap
    int max_inner_iter = 1000;          // dual FISTA iteration cap
    double tol_rel = 1e-6;              // outer relative objective tolerance
    double tol_dual = 1e-8;             // inner dual relative tolerance
    double initial_step = 1.0;          // tau_0, trial step for outer FISTA
    double backtrack_factor = 0.5;      // c, step shrink factor
    double dual_initial_step = 1.0;     // kappa_0 for the dual FISTA
    double dual_backtrack_factor = 0.5; // c tilde
    bool dual_constant_step = false;    // use step 1/(2 lambda2^2 gamma^2) instead of line search

    void validate() const;  // throws std::invalid_argument
};

// --- Elementwise primitives ----------------------------------------------

// (M_D, M_X): diagonal part and off-diagonal part; M_D + M_X == M exactly.
std::pair<SymMatrix, SymMatrix> split_diag(const SymMatrix& m);

// Entrywise sign(x) * max(|x| - t, 0). t must be >= 0.
Matrix soft_threshold(const Matrix& m, double t);
SymMatrix soft_threshold(const SymMatrix& m, double t);

double frob_norm_sq(const Matrix& m);
inline double frob_norm_sq(const SymMatrix& m) { return frob_norm_sq(m.mat()); }

}  // namespace ccmrce
