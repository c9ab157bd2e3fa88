#include "ccmrce/cconcord.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ccmrce/concord.hpp"
#include "test_support.hpp"

using namespace ccmrce;

namespace {

bool trace_nonincreasing(const std::vector<double>& trace, double slack = 1e-10) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i] > trace[i - 1] + slack * (1.0 + std::abs(trace[i - 1]))) return false;
    }
    return true;
}

}  // namespace

TEST(CConcordObjective, FeasibleEqualsUnconstrained) {
    std::mt19937 rng(3);
    const SymMatrix s = testsup::random_psd(4, rng);
    const SymMatrix omega = testsup::random_pd_omega(4, rng);
    const auto all = make_all_allowed(4);
    EXPECT_DOUBLE_EQ(cconcord_objective(omega, s, 0.3, *all), concord_objective(omega, s, 0.3));
}

TEST(CConcordObjective, InfeasiblePointIsInfinite) {
    std::mt19937 rng(5);
    const SymMatrix s = testsup::random_psd(3, rng);
    SymMatrix omega = SymMatrix::identity(3);
    omega.set(0, 1, 0.5);
    const MaskConstraint diag_only(SparsityMask::from_matrix(Matrix::Identity(3, 3)));
    EXPECT_TRUE(std::isinf(cconcord_objective(omega, s, 0.1, diag_only)));

    // feasible under a mask that allows the entry
    SparsityMask allow01 = SparsityMask::from_matrix(Matrix::Identity(3, 3));
    allow01.allow(0, 1);
    const MaskConstraint c(allow01);
    EXPECT_TRUE(std::isfinite(cconcord_objective(omega, s, 0.1, c)));
}

TEST(CConcordFit, AllAllowedMatchesUnconstrained) {
    std::mt19937 rng(7);
    for (int rep = 0; rep < 3; ++rep) {
        const SymMatrix s = testsup::random_psd(5, rng);
        SolverOptions opts;
        opts.tol_rel = 1e-10;
        const auto all = make_all_allowed(5);
        const ConcordResult unc = concord_fit(s, 0.2, opts);
        const ConcordResult con = cconcord_fit(s, 0.2, *all, opts);
        EXPECT_NEAR(concord_objective(con.omega, s, 0.2), concord_objective(unc.omega, s, 0.2),
                    1e-6 * (1.0 + std::abs(concord_objective(unc.omega, s, 0.2))));
    }
}

TEST(CConcordFit, DiagonalOnlyMaskClosedForm) {
    Vector d(2);
    d << 4.0, 1.0;
    const MaskConstraint diag_only(SparsityMask::from_matrix(Matrix::Identity(2, 2)));
    SolverOptions opts;
    const ConcordResult res = cconcord_fit(SymMatrix::from_diagonal(d), 0.05, diag_only, opts);
    EXPECT_NEAR(res.omega(0, 0), 0.5, 1e-5);
    EXPECT_NEAR(res.omega(1, 1), 1.0, 1e-5);
    EXPECT_EQ(res.omega(0, 1), 0.0);
}

TEST(CConcordFit, IteratesStayFeasibleExactly) {
    std::mt19937 rng(11);
    const SymMatrix s = testsup::random_psd(6, rng);
    const SparsityMask mask = testsup::random_mask(6, rng, 0.3);
    const MaskConstraint constraint(mask);
    SolverOptions opts;
    const ConcordResult res = cconcord_fit(s, 0.1, constraint, opts);
    for (Index j = 0; j < 6; ++j) {
        for (Index k = 0; k < 6; ++k) {
            if (j != k && !mask.allowed(j, k)) {
                EXPECT_EQ(res.omega(j, k), 0.0);
            }
        }
    }
    EXPECT_TRUE(trace_nonincreasing(res.trace));
    EXPECT_GT(res.min_diag, 0.0);
}

// Tightening the constraint never improves the optimum.
TEST(CConcordFit, NestedMasksOrderOptima) {
    std::mt19937 rng(13);
    const SymMatrix s = testsup::random_psd(5, rng);
    SolverOptions opts;
    opts.tol_rel = 1e-10;

    SparsityMask tight = testsup::random_mask(5, rng, 0.25);
    SparsityMask loose = tight;
    for (Index j = 0; j < 5; ++j) {
        for (Index k = j + 1; k < 5; ++k) {
            if (!loose.allowed(j, k) && ((j + k) % 2 == 0)) loose.allow(j, k);
        }
    }
    const MaskConstraint c_tight(tight);
    const MaskConstraint c_loose(loose);
    const double f_tight =
        concord_objective(cconcord_fit(s, 0.15, c_tight, opts).omega, s, 0.15);
    const double f_loose =
        concord_objective(cconcord_fit(s, 0.15, c_loose, opts).omega, s, 0.15);
    EXPECT_GE(f_tight, f_loose - 1e-6);
}

TEST(CConcordFit, DeterministicBitIdenticalRuns) {
    std::mt19937 rng(17);
    const SymMatrix s = testsup::random_psd(5, rng);
    const SparsityMask mask = testsup::random_mask(5, rng, 0.4);
    const MaskConstraint constraint(mask);
    SolverOptions opts;
    const ConcordResult a = cconcord_fit(s, 0.2, constraint, opts);
    const ConcordResult b = cconcord_fit(s, 0.2, constraint, opts);
    EXPECT_EQ(a.omega.mat(), b.omega.mat());
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(CConcordFit, PerfectSupportMaskKeepsTrueZeros) {
    std::mt19937 rng(19);
    // ground truth with a known sparse support
    SymMatrix omega0 = SymMatrix::identity(5);
    omega0.set(0, 1, 0.4);
    omega0.set(2, 3, -0.3);
    const SparsityMask perfect = SparsityMask::from_support(omega0);
    const MaskConstraint constraint(perfect);

    const SymMatrix s = testsup::random_psd(5, rng);
    SolverOptions opts;
    const ConcordResult res = cconcord_fit(s, 0.05, constraint, opts);
    for (Index j = 0; j < 5; ++j) {
        for (Index k = j + 1; k < 5; ++k) {
            if (omega0(j, k) == 0.0) {
                EXPECT_EQ(res.omega(j, k), 0.0);
            }
        }
    }
}

TEST(CConcordFit, WarmStartProjectsInfeasibleInput) {
    std::mt19937 rng(23);
    const SymMatrix s = testsup::random_psd(4, rng);
    const MaskConstraint diag_only(SparsityMask::from_matrix(Matrix::Identity(4, 4)));
    SymMatrix warm = testsup::random_pd_omega(4, rng);  // dense, infeasible
    SolverOptions opts;
    const ConcordResult res = cconcord_fit(s, 0.1, diag_only, opts, &warm);
    Matrix off = res.omega.mat();
    off.diagonal().setZero();
    EXPECT_EQ(off, Matrix::Zero(4, 4));
    EXPECT_TRUE(trace_nonincreasing(res.trace));
}
