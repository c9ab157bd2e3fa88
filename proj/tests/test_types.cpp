#include "ccmrce/types.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ccmrce/errors.hpp"
#include "test_support.hpp"

using namespace ccmrce;

TEST(SymMatrix, RejectsAsymmetricAndNonFinite) {
    Matrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    EXPECT_THROW(SymMatrix{m}, std::invalid_argument);

    Matrix nan(2, 2);
    nan << 1.0, 0.0, 0.0, std::nan("");
    EXPECT_THROW(SymMatrix{nan}, std::invalid_argument);

    EXPECT_THROW(SymMatrix{Matrix::Zero(2, 3)}, std::invalid_argument);
}

TEST(SymMatrix, SetWritesBothHalves) {
    SymMatrix s = SymMatrix::zero(3);
    s.set(0, 2, 1.5);
    EXPECT_EQ(s(0, 2), 1.5);
    EXPECT_EQ(s(2, 0), 1.5);
    EXPECT_THROW(s.set(0, 1, std::nan("")), std::invalid_argument);
}

TEST(SymMatrix, FromSymmetrizedIsExactlySymmetric) {
    std::mt19937 rng(7);
    const Matrix m = testsup::random_matrix(5, 5, rng);
    const SymMatrix s = SymMatrix::from_symmetrized(m);
    for (Index j = 0; j < 5; ++j) {
        for (Index k = 0; k < 5; ++k) {
            EXPECT_EQ(s(j, k), s(k, j));
        }
    }
    EXPECT_EQ(s(2, 2), m(2, 2));
}

TEST(SplitDiag, DefinitionalExamples) {
    Matrix m(2, 2);
    m << 2.0, 1.0, 1.0, 3.0;
    const auto [d, x] = split_diag(SymMatrix(m));
    Matrix de(2, 2), xe(2, 2);
    de << 2.0, 0.0, 0.0, 3.0;
    xe << 0.0, 1.0, 1.0, 0.0;
    EXPECT_EQ(d.mat(), de);
    EXPECT_EQ(x.mat(), xe);

    const auto [di, xi] = split_diag(SymMatrix::identity(4));
    EXPECT_EQ(di.mat(), Matrix::Identity(4, 4));
    EXPECT_EQ(xi.mat(), Matrix::Zero(4, 4));
}

TEST(SplitDiag, ReconstructsBitExactlyAndIsIdempotent) {
    std::mt19937 rng(11);
    const SymMatrix m = testsup::random_sym(4, rng);
    const auto [d, x] = split_diag(m);
    EXPECT_EQ(Matrix(d.mat() + x.mat()), m.mat());

    // split(M_D).X == 0 and split(M_X).D == 0
    EXPECT_EQ(split_diag(d).second.mat(), Matrix::Zero(4, 4));
    EXPECT_EQ(split_diag(x).first.mat(), Matrix::Zero(4, 4));
}

TEST(SoftThreshold, ScalarExamples) {
    Matrix m(1, 1);
    m << 1.0;
    EXPECT_DOUBLE_EQ(soft_threshold(m, 0.2)(0, 0), 0.8);
    m << -0.1;
    EXPECT_DOUBLE_EQ(soft_threshold(m, 0.2)(0, 0), 0.0);
}

TEST(SoftThreshold, ZeroThresholdIsIdentity) {
    std::mt19937 rng(3);
    const Matrix m = testsup::random_matrix(4, 3, rng);
    EXPECT_EQ(soft_threshold(m, 0.0), m);
}

TEST(SoftThreshold, RejectsNegativeThreshold) {
    EXPECT_THROW(soft_threshold(Matrix::Zero(2, 2), -0.1), std::invalid_argument);
}

TEST(SoftThreshold, ShrinkageAndNonexpansiveness) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> tdist(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix a = testsup::random_matrix(4, 4, rng, -2.0, 2.0);
        const Matrix b = testsup::random_matrix(4, 4, rng, -2.0, 2.0);
        const double t = tdist(rng);
        const Matrix sa = soft_threshold(a, t);
        EXPECT_TRUE((sa.cwiseAbs().array() <= a.cwiseAbs().array() + 1e-15).all());
        EXPECT_LE((sa - soft_threshold(b, t)).norm(), (a - b).norm() + 1e-12);
    }
}

TEST(FrobNormSq, Examples) {
    EXPECT_DOUBLE_EQ(frob_norm_sq(Matrix::Zero(3, 3)), 0.0);
    EXPECT_DOUBLE_EQ(frob_norm_sq(Matrix::Identity(3, 3)), 3.0);
    Matrix m(2, 2);
    m << 1.0, 2.0, 2.0, 1.0;
    // direct summation oracle
    double expected = 0.0;
    for (Index i = 0; i < 2; ++i) {
        for (Index j = 0; j < 2; ++j) expected += m(i, j) * m(i, j);
    }
    EXPECT_DOUBLE_EQ(frob_norm_sq(m), expected);
    EXPECT_DOUBLE_EQ(frob_norm_sq(m), 10.0);
}

TEST(Dataset, ValidatesRowCounts) {
    EXPECT_THROW(Dataset(Matrix::Zero(3, 2), Matrix::Zero(4, 2)), DataError);
    const Dataset d(Matrix::Zero(3, 2), Matrix::Zero(3, 5));
    EXPECT_EQ(d.n(), 3);
    EXPECT_EQ(d.p(), 2);
    EXPECT_EQ(d.q(), 5);
}

TEST(SolverOptions, Validation) {
    SolverOptions opts;
    EXPECT_NO_THROW(opts.validate());
    opts.backtrack_factor = 1.0;
    EXPECT_THROW(opts.validate(), std::invalid_argument);
    opts = SolverOptions{};
    opts.tol_rel = 0.0;
    EXPECT_THROW(opts.validate(), std::invalid_argument);
    opts = SolverOptions{};
    opts.initial_step = 1.5;
    EXPECT_THROW(opts.validate(), std::invalid_argument);
    opts = SolverOptions{};
    opts.max_outer_iter = 0;
    EXPECT_THROW(opts.validate(), std::invalid_argument);
}
