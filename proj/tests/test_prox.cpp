#include "ccmrce/prox.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace ccmrce;

namespace {

SolverOptions tight_dual_opts() {
    SolverOptions opts;
    opts.tol_dual = 1e-13;
    opts.max_inner_iter = 5000;
    return opts;
}

// Primal value of the prox problem at a feasible off-diagonal point.
double primal_value(const Matrix& omega_x, const Matrix& a_x, double gamma, double lambda2) {
    return (omega_x - a_x).squaredNorm() / (2.0 * gamma) + lambda2 * omega_x.cwiseAbs().sum();
}

// Dual value corresponding to Eq.-style saddle point: (||A_X||^2 - g1(H)) / (2 gamma).
double dual_value(const SymMatrix& h, const ProxProblem& prob) {
    Matrix a_x = prob.a.mat();
    a_x.diagonal().setZero();
    return (a_x.squaredNorm() - dual_objective(h, prob)) / (2.0 * prob.gamma);
}

double scalar_soft(double v, double t) {
    const double s = std::abs(v) - t;
    return s > 0.0 ? (v > 0.0 ? s : -s) : 0.0;
}

}  // namespace

TEST(DualGradient, DirectSubstitutionAtZero) {
    std::mt19937 rng(3);
    const SymMatrix a = testsup::random_sym(4, rng);
    const SparsityMask mask = testsup::random_mask(4, rng, 0.5);
    const MaskConstraint constraint(mask);
    const ProxProblem prob{a, 0.7, 0.3, &constraint};

    const SymMatrix g = dual_gradient(SymMatrix::zero(4), prob);
    Matrix a_x = a.mat();
    a_x.diagonal().setZero();
    const Matrix expected = -2.0 * 0.7 * 0.3 * constraint.project(a_x);
    EXPECT_LE((g.mat() - expected).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(g.mat().diagonal(), Vector::Zero(4));
}

TEST(DualGradient, ZeroPenaltyGivesZeroGradient) {
    std::mt19937 rng(5);
    const SymMatrix a = testsup::random_sym(4, rng);
    const auto constraint = make_all_allowed(4);
    const ProxProblem prob{a, 1.3, 0.0, constraint.get()};
    const SymMatrix h = testsup::random_sym(4, rng);
    EXPECT_EQ(dual_gradient(h, prob).mat(), Matrix::Zero(4, 4));
}

TEST(DualGradient, MatchesFiniteDifferences) {
    std::mt19937 rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        const SymMatrix a = testsup::random_sym(4, rng);
        const SparsityMask mask = testsup::random_mask(4, rng, 0.6);
        const MaskConstraint constraint(mask);
        const ProxProblem prob{a, 0.9, 0.4, &constraint};
        SymMatrix h = SymMatrix(linf_ball_project(testsup::random_sym(4, rng).mat()));
        Matrix hm = h.mat();
        hm.diagonal().setZero();
        h = SymMatrix(hm);

        const SymMatrix grad = dual_gradient(h, prob);
        auto f = [&](const Matrix& m) { return dual_objective(SymMatrix(m), prob); };
        for (int dir_rep = 0; dir_rep < 4; ++dir_rep) {
            const Matrix dir = testsup::random_symmetric_direction(4, rng, /*zero_diag=*/true);
            const double fd = testsup::central_fd(f, h.mat(), dir, 1e-6);
            const double analytic = grad.mat().cwiseProduct(dir).sum();
            EXPECT_NEAR(fd, analytic, 1e-6 * std::max(1.0, std::abs(analytic)));
        }
    }
}

TEST(SolveDual, AllAllowedClosedFormClamp) {
    std::mt19937 rng(11);
    const SymMatrix a = testsup::random_sym(5, rng, -2.0, 2.0);
    const auto constraint = make_all_allowed(5);
    const double gamma = 0.8, lambda2 = 0.35;
    const ProxProblem prob{a, gamma, lambda2, constraint.get()};

    const DualResult res = solve_dual(prob, tight_dual_opts());
    EXPECT_TRUE(res.converged);
    for (Index j = 0; j < 5; ++j) {
        for (Index k = 0; k < 5; ++k) {
            if (j == k) continue;
            const double expected = std::clamp(a(j, k) / (gamma * lambda2), -1.0, 1.0);
            EXPECT_NEAR(res.h(j, k), expected, 1e-6);
        }
    }
}

TEST(SolveDual, ZeroPenaltyReturnsZeroByConvention) {
    std::mt19937 rng(13);
    const SymMatrix a = testsup::random_sym(4, rng);
    const auto constraint = make_all_allowed(4);
    const ProxProblem prob{a, 1.0, 0.0, constraint.get()};
    const DualResult res = solve_dual(prob, SolverOptions{});
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.h.mat(), Matrix::Zero(4, 4));
}

// Brute force: refine a grid over the two allowed pair variables of the dual.
TEST(SolveDual, MatchesBruteForceBoxMinimization) {
    std::mt19937 rng(17);
    const SymMatrix a = testsup::random_sym(3, rng, -1.5, 1.5);
    SparsityMask mask = SparsityMask::from_matrix(Matrix::Identity(3, 3));
    mask.allow(0, 1);
    mask.allow(1, 2);
    const MaskConstraint constraint(mask);
    const double gamma = 0.6, lambda2 = 0.5;
    const ProxProblem prob{a, gamma, lambda2, &constraint};

    const DualResult res = solve_dual(prob, tight_dual_opts());
    const double solver_obj = dual_objective(res.h, prob);

    auto box_obj = [&](double h01, double h12) {
        SymMatrix h = SymMatrix::zero(3);
        h.set(0, 1, h01);
        h.set(1, 2, h12);
        return dual_objective(h, prob);
    };
    double lo1 = -1.0, hi1 = 1.0, lo2 = -1.0, hi2 = 1.0;
    double best = box_obj(0.0, 0.0);
    for (int level = 0; level < 12; ++level) {
        double arg1 = lo1, arg2 = lo2;
        best = std::numeric_limits<double>::infinity();
        const int steps = 24;
        for (int i = 0; i <= steps; ++i) {
            for (int j = 0; j <= steps; ++j) {
                const double v1 = lo1 + (hi1 - lo1) * i / steps;
                const double v2 = lo2 + (hi2 - lo2) * j / steps;
                const double val = box_obj(v1, v2);
                if (val < best) {
                    best = val;
                    arg1 = v1;
                    arg2 = v2;
                }
            }
        }
        const double w1 = (hi1 - lo1) / steps, w2 = (hi2 - lo2) / steps;
        lo1 = std::max(-1.0, arg1 - 2 * w1);
        hi1 = std::min(1.0, arg1 + 2 * w1);
        lo2 = std::max(-1.0, arg2 - 2 * w2);
        hi2 = std::min(1.0, arg2 + 2 * w2);
    }
    EXPECT_NEAR(solver_obj, best, 1e-6 * (1.0 + std::abs(best)));
}

TEST(ConstrainedProx, AllAllowedMatchesSoftThreshold) {
    std::mt19937 rng(19);
    const SymMatrix a = testsup::random_sym(5, rng, -2.0, 2.0);
    const auto constraint = make_all_allowed(5);
    const double gamma = 0.45, lambda2 = 0.6;
    const ProxProblem prob{a, gamma, lambda2, constraint.get()};

    const ProxResult res = constrained_prox(prob, tight_dual_opts());
    for (Index j = 0; j < 5; ++j) {
        for (Index k = 0; k < 5; ++k) {
            const double expected =
                j == k ? a(j, j) : scalar_soft(a(j, k), gamma * lambda2);
            EXPECT_NEAR(res.omega(j, k), expected, 1e-8);
        }
    }
}

TEST(ConstrainedProx, ZeroPenaltyIsPureProjection) {
    std::mt19937 rng(23);
    const SymMatrix a = testsup::random_sym(4, rng);
    const SparsityMask mask = testsup::random_mask(4, rng, 0.5);
    const MaskConstraint constraint(mask);
    const ProxProblem prob{a, 0.9, 0.0, &constraint};
    const ProxResult res = constrained_prox(prob, SolverOptions{});
    const auto [a_d, a_x] = split_diag(a);
    const Matrix expected = constraint.project(a_x.mat()) + a_d.mat();
    EXPECT_EQ(res.omega.mat(), expected);
}

TEST(ConstrainedProx, DisallowedEntriesAreExactlyZero) {
    std::mt19937 rng(29);
    for (int rep = 0; rep < 10; ++rep) {
        const SymMatrix a = testsup::random_sym(5, rng, -3.0, 3.0);
        const SparsityMask mask = testsup::random_mask(5, rng, 0.4);
        const MaskConstraint constraint(mask);
        const ProxProblem prob{a, 0.7, 0.25, &constraint};
        const ProxResult res = constrained_prox(prob, SolverOptions{});
        for (Index j = 0; j < 5; ++j) {
            for (Index k = 0; k < 5; ++k) {
                if (j != k && !mask.allowed(j, k)) {
                    EXPECT_EQ(res.omega(j, k), 0.0);
                }
            }
        }
    }
}

// First-order condition of the prox problem on 3x3 instances: for each
// allowed entry, (omega - a)/gamma + lambda2 g = 0 with g in the subgradient.
TEST(ConstrainedProx, FirstOrderConditionCertificate) {
    std::mt19937 rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const SymMatrix a = testsup::random_sym(3, rng, -2.0, 2.0);
        const SparsityMask mask = testsup::random_mask(3, rng, 0.7);
        const MaskConstraint constraint(mask);
        const double gamma = 0.3 + 0.5 * (rep % 4);
        const double lambda2 = 0.1 + 0.2 * (rep % 3);
        const ProxProblem prob{a, gamma, lambda2, &constraint};
        const ProxResult res = constrained_prox(prob, tight_dual_opts());
        for (Index j = 0; j < 3; ++j) {
            for (Index k = 0; k < 3; ++k) {
                if (j == k || !mask.allowed(j, k)) continue;
                const double w = res.omega(j, k);
                const double resid = (w - a(j, k)) / gamma;
                if (w != 0.0) {
                    EXPECT_NEAR(resid + lambda2 * (w > 0 ? 1.0 : -1.0), 0.0, 1e-5);
                } else {
                    EXPECT_LE(std::abs(resid), lambda2 + 1e-5);
                }
            }
        }
    }
}

TEST(ConstrainedProx, Nonexpansive) {
    std::mt19937 rng(37);
    const SparsityMask mask = testsup::random_mask(5, rng, 0.5);
    const MaskConstraint constraint(mask);
    for (int rep = 0; rep < 10; ++rep) {
        const SymMatrix a1 = testsup::random_sym(5, rng, -2.0, 2.0);
        const SymMatrix a2 = testsup::random_sym(5, rng, -2.0, 2.0);
        const ProxProblem p1{a1, 0.6, 0.3, &constraint};
        const ProxProblem p2{a2, 0.6, 0.3, &constraint};
        const ProxResult r1 = constrained_prox(p1, tight_dual_opts());
        const ProxResult r2 = constrained_prox(p2, tight_dual_opts());
        EXPECT_LE((r1.omega.mat() - r2.omega.mat()).norm(),
                  (a1.mat() - a2.mat()).norm() + 1e-7);
    }
}

// Lemma-backed constant step 1/(2 lambda2^2 gamma^2) reaches the same optimum
// as backtracking.
TEST(SolveDual, ConstantStepMatchesBacktracking) {
    std::mt19937 rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        const SymMatrix a = testsup::random_sym(5, rng, -2.0, 2.0);
        const SparsityMask mask = testsup::random_mask(5, rng, 0.5);
        const MaskConstraint constraint(mask);
        const ProxProblem prob{a, 0.5 + 0.2 * rep, 0.2 + 0.1 * (rep % 3), &constraint};

        SolverOptions bt = tight_dual_opts();
        SolverOptions cs = tight_dual_opts();
        cs.dual_constant_step = true;

        const double f_bt = dual_objective(solve_dual(prob, bt).h, prob);
        const double f_cs = dual_objective(solve_dual(prob, cs).h, prob);
        EXPECT_NEAR(f_cs, f_bt, 1e-5 * (1.0 + std::abs(f_bt)));
    }
}

// Primal objective at the recovered point minus dual value stays below 1e-5.
TEST(ConstrainedProx, DualityGapVanishes) {
    std::mt19937 rng(43);
    for (int rep = 0; rep < 10; ++rep) {
        const SymMatrix a = testsup::random_sym(4, rng, -2.0, 2.0);
        const SparsityMask mask = testsup::random_mask(4, rng, 0.5);
        const MaskConstraint constraint(mask);
        const ProxProblem prob{a, 0.8, 0.4, &constraint};
        const ProxResult res = constrained_prox(prob, tight_dual_opts());

        Matrix a_x = a.mat();
        a_x.diagonal().setZero();
        Matrix omega_x = res.omega.mat();
        omega_x.diagonal().setZero();
        const double gap =
            primal_value(omega_x, a_x, prob.gamma, prob.lambda2) - dual_value(res.h, prob);
        EXPECT_GE(gap, -1e-9);
        EXPECT_LE(gap, 1e-5);
    }
}

TEST(ProxProblem, Validation) {
    const auto constraint = make_all_allowed(3);
    ProxProblem bad{SymMatrix::zero(3), 0.0, 0.1, constraint.get()};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    ProxProblem negative{SymMatrix::zero(3), 1.0, -0.1, constraint.get()};
    EXPECT_THROW(negative.validate(), std::invalid_argument);
    ProxProblem mismatched{SymMatrix::zero(4), 1.0, 0.1, constraint.get()};
    EXPECT_THROW(mismatched.validate(), std::invalid_argument);
    ProxProblem null_constraint{SymMatrix::zero(3), 1.0, 0.1, nullptr};
    EXPECT_THROW(null_constraint.validate(), std::invalid_argument);
}
