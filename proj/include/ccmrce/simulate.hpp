#pragma once

#include <cstdint>

#include "ccmrce/constraints.hpp"
#include "ccmrce/types.hpp"

namespace ccmrce {

// Synthetic-data protocol: sparse PD omega0 from a sparse Cholesky factor,
// sparse B0 = W o K o Q, AR-correlated Gaussian predictors and multivariate-t
// residuals with covariance omega0^{-1}.
struct SimConfig {
    Index p = 20;
    Index q = 20;
    Index n = 50;
    double density = 0.10;  // target off-diagonal nonzero fraction of omega0
    double s1 = 0.15;       // entry keep probability of B0
    double s2 = 0.80;       // row keep probability of B0
    double t_dof = 5.0;     // residual t degrees of freedom (> 2)
    double ar_coef = 0.5;   // (Sigma_X)_jk = ar_coef^|j-k|
    std::uint64_t seed = 0;
    bool gaussian_noise = false;  // nu -> infinity variant
    bool zero_noise = false;      // E = 0 variant
    double cond_cap = 0.0;        // > 0: inflate omega0's diagonal to cap its condition number

    void validate() const;
};

struct OmegaInfo {
    SymMatrix omega;
    double density_achieved = 0.0;
    double condition_number = 0.0;
    int resamples = 0;
};

// omega0 = L L^T from a sparse lower-triangular L (diagonal U(0.5, 1.5),
// selected off-diagonal entries U(-0.5, 0.5)); L's sparsity is resampled until
// the product's off-diagonal nonzero fraction lands within +-0.02 of density.
// Throws DataError with diagnostics after 100 failed resamples.
OmegaInfo gen_omega0(Index p, double density, std::uint64_t seed, double cond_cap = 0.0);

// B0 = W o K o Q: W iid standard normal, K iid Bernoulli(s1), Q rows all-one
// with probability s2 else all-zero.
CoefMatrix gen_b0(Index p, Index q, double s1, double s2, std::uint64_t seed);

// Rows iid multivariate t with nu degrees of freedom, zero mean and covariance
// exactly sigma (scale matrix (nu-2)/nu * sigma). gaussian = true samples
// N(0, sigma) instead.
Matrix sample_t_noise(Index n, const SymMatrix& sigma, double nu, std::uint64_t seed,
                      bool gaussian = false);

struct SimData {
    Dataset data;
    CoefMatrix b0;
    SymMatrix omega0;
    double density_achieved = 0.0;
    double condition_number = 0.0;
};

// Full draw: (omega0, B0), X with AR covariance, E, Y = X B0 + E.
SimData gen_dataset(const SimConfig& cfg);

// Fresh X and E with the same ground truth (the validation replicate).
Dataset gen_validation(const SimConfig& cfg, const CoefMatrix& b0, const SymMatrix& omega0);

// Support of omega0 plus floor(extra_ratio * nonzero pair count) spurious
// pairs drawn from the zero off-diagonal positions. A single shuffled
// candidate stream per seed makes masks nested across ratios.
SparsityMask perturb_mask(const SymMatrix& omega0, double extra_ratio, std::uint64_t seed);

// --- SPD helpers (simulate-scale dense problems only) -----------------------

bool is_positive_definite(const SymMatrix& s);
SymMatrix spd_inverse(const SymMatrix& s);         // throws DataError if not PD
double sym_condition_number(const SymMatrix& s);   // max |eig| / min |eig|

}  // namespace ccmrce
