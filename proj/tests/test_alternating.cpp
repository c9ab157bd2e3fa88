#include "ccmrce/alternating.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ccmrce/cconcord.hpp"
#include "ccmrce/concord.hpp"
#include "ccmrce/errors.hpp"
#include "ccmrce/regression.hpp"
#include "ccmrce/simulate.hpp"
#include "test_support.hpp"

using namespace ccmrce;

namespace {

bool trace_nonincreasing(const std::vector<double>& trace, double slack = 1e-10) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i] > trace[i - 1] + slack * (1.0 + std::abs(trace[i - 1]))) return false;
    }
    return true;
}

Dataset random_dataset(Index n, Index p, Index q, std::mt19937& rng) {
    return Dataset(testsup::random_matrix(n, p, rng), testsup::random_matrix(n, q, rng));
}

}  // namespace

TEST(ResidualCov, ExactFitGivesZero) {
    std::mt19937 rng(3);
    const Matrix x = testsup::random_matrix(5, 3, rng);
    const CoefMatrix b = testsup::random_matrix(3, 2, rng);
    const Dataset data(x, x * b);
    EXPECT_LE(residual_cov(data, b).mat().cwiseAbs().maxCoeff(), 1e-25);
}

TEST(ResidualCov, ZeroCoefficientsGiveScaledGram) {
    std::mt19937 rng(5);
    const Dataset data = random_dataset(6, 3, 4, rng);
    const SymMatrix s = residual_cov(data, CoefMatrix::Zero(3, 4));
    const Matrix expected = data.Y.transpose() * data.Y / 6.0;
    EXPECT_LE((s.mat() - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ResidualCov, MatchesPerSampleSummation) {
    std::mt19937 rng(7);
    const Dataset data = random_dataset(4, 2, 3, rng);
    const CoefMatrix b = testsup::random_matrix(2, 3, rng);
    const SymMatrix s = residual_cov(data, b);
    // direct per-sample summation oracle
    Matrix expected = Matrix::Zero(3, 3);
    for (Index i = 0; i < 4; ++i) {
        const Vector r = (data.Y.row(i) - data.X.row(i) * b).transpose();
        expected += r * r.transpose();
    }
    expected /= 4.0;
    EXPECT_LE((s.mat() - expected).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(FullObjective, BaselineExample) {
    std::mt19937 rng(11);
    const Dataset data = random_dataset(5, 3, 3, rng);
    const double f = full_objective(data, CoefMatrix::Zero(3, 3), SymMatrix::identity(3), 0.0, 0.0);
    EXPECT_NEAR(f, 0.5 * (data.Y.transpose() * data.Y).trace(), 1e-10);
}

TEST(FullObjective, InfeasibleOmegaIsInfinite) {
    std::mt19937 rng(13);
    const Dataset data = random_dataset(5, 3, 3, rng);
    SymMatrix omega = SymMatrix::identity(3);
    omega.set(0, 2, 0.4);
    const MaskConstraint diag_only(SparsityMask::from_matrix(Matrix::Identity(3, 3)));
    EXPECT_TRUE(std::isinf(
        full_objective(data, CoefMatrix::Zero(3, 3), omega, 0.1, 0.1, &diag_only)));
}

// Algebraic identity linking the full objective to the omega subproblem.
TEST(FullObjective, ConsistentWithSubproblemObjective) {
    std::mt19937 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        const Dataset data = random_dataset(6, 3, 4, rng);
        const CoefMatrix b = testsup::random_matrix(3, 4, rng);
        const SymMatrix omega = testsup::random_pd_omega(4, rng);
        const auto all = make_all_allowed(4);
        const double lambda2 = 0.3;
        const double lhs = full_objective(data, b, omega, 0.0, lambda2, all.get());
        const double rhs = static_cast<double>(data.n()) *
                           cconcord_objective(omega, residual_cov(data, b), lambda2, *all);
        EXPECT_NEAR(lhs, rhs, 1e-9 * (1.0 + std::abs(rhs)));
    }
}

TEST(FitConcordMrce, HugePenaltiesCollapseToClosedForm) {
    std::mt19937 rng(19);
    const Dataset data = random_dataset(12, 4, 3, rng);
    AltOptions opts;
    const FitResult res = fit_concord_mrce(data, 1e8, 1e8, opts);
    EXPECT_EQ(res.B, CoefMatrix::Zero(4, 3));
    const Matrix gram = data.Y.transpose() * data.Y / 12.0;
    for (Index j = 0; j < 3; ++j) {
        EXPECT_NEAR(res.omega(j, j), 1.0 / std::sqrt(gram(j, j)), 1e-4);
        for (Index k = j + 1; k < 3; ++k) {
            EXPECT_EQ(res.omega(j, k), 0.0);
        }
    }
}

TEST(FitConcordMrce, RecoversCoefficientsOnNoiselessData) {
    SimConfig cfg;
    cfg.p = 5;
    cfg.q = 4;
    cfg.n = 80;
    cfg.zero_noise = true;
    cfg.seed = 99;
    cfg.density = 0.2;
    const SimData sim = gen_dataset(cfg);
    AltOptions opts;
    opts.max_outer_iter = 5;
    opts.solver.max_outer_iter = 500;
    const FitResult res = fit_concord_mrce(sim.data, 1e-6, 1e-6, opts);
    EXPECT_LE((res.B - sim.b0).norm(), 1e-3);
}

TEST(FitConcordMrce, TraceNonincreasing) {
    std::mt19937 rng(23);
    const Dataset data = random_dataset(15, 4, 4, rng);
    AltOptions opts;
    const FitResult res = fit_concord_mrce(data, 0.1, 0.1, opts);
    EXPECT_TRUE(trace_nonincreasing(res.objective_trace));
    EXPECT_TRUE(res.converged);
    EXPECT_GT(res.min_omega_diag, 0.0);
    EXPECT_EQ(res.objective_trace.size(), static_cast<std::size_t>(res.outer_iters) + 1);
}

TEST(FitCcMrce, AllAllowedMatchesUnconstrained) {
    std::mt19937 rng(29);
    for (int rep = 0; rep < 3; ++rep) {
        const Dataset data = random_dataset(12, 4, 4, rng);
        AltOptions opts;
        const auto all = make_all_allowed(4);
        const FitResult unc = fit_concord_mrce(data, 0.2, 0.2, opts);
        const FitResult con = fit_cc_mrce(data, 0.2, 0.2, *all, opts);
        const double fu = unc.objective_trace.back();
        const double fc = con.objective_trace.back();
        EXPECT_NEAR(fc, fu, 1e-5 * (1.0 + std::abs(fu)));
    }
}

TEST(FitCcMrce, PerfectMaskHasZeroFalsePositives) {
    SimConfig cfg;
    cfg.seed = 7;
    cfg.p = 8;
    cfg.q = 8;
    cfg.n = 40;
    const SimData sim = gen_dataset(cfg);
    const SparsityMask perfect = perturb_mask(sim.omega0, 0.0, 123);
    const MaskConstraint constraint(perfect);
    AltOptions opts;
    const FitResult res = fit_cc_mrce(sim.data, 0.1, 0.1, constraint, opts);
    for (Index j = 0; j < 8; ++j) {
        for (Index k = j + 1; k < 8; ++k) {
            if (sim.omega0(j, k) == 0.0) {
                EXPECT_EQ(res.omega(j, k), 0.0);
            }
        }
    }
    EXPECT_TRUE(trace_nonincreasing(res.objective_trace));
}

TEST(FitCcMrce, FixedPointAfterConvergence) {
    std::mt19937 rng(31);
    const Dataset data = random_dataset(14, 4, 4, rng);
    const SparsityMask mask = testsup::random_mask(4, rng, 0.5);
    const MaskConstraint constraint(mask);
    AltOptions opts;
    const FitResult res = fit_cc_mrce(data, 0.15, 0.15, constraint, opts);
    ASSERT_TRUE(res.converged);

    // one more full alternation changes the objective by <= tol*(1+|f|)
    const SolverOptions sub = opts.subproblem_options();
    const SymMatrix s = residual_cov(data, res.B);
    const ConcordResult omega_next = cconcord_fit(s, 0.15, constraint, sub, &res.omega);
    const CoefMatrix b_next = b_update(data, omega_next.omega, 0.15, res.B, sub).b;
    const double f0 = res.objective_trace.back();
    const double f1 = full_objective(data, b_next, omega_next.omega, 0.15, 0.15, &constraint);
    EXPECT_LE(std::abs(f1 - f0), opts.tol_rel * (1.0 + std::abs(f0)) * 10.0);
}

TEST(Fit, RejectsBadInputs) {
    std::mt19937 rng(37);
    const Dataset data = random_dataset(6, 3, 3, rng);
    AltOptions opts;
    EXPECT_THROW(fit_concord_mrce(data, -0.1, 0.1, opts), std::invalid_argument);
    const Dataset tiny(Matrix::Zero(1, 2), Matrix::Zero(1, 2));
    EXPECT_THROW(fit_concord_mrce(tiny, 0.1, 0.1, opts), DataError);
    const MaskConstraint wrong_dim(SparsityMask::all_allowed(5));
    EXPECT_THROW(fit_cc_mrce(data, 0.1, 0.1, wrong_dim, opts), DataError);
}
