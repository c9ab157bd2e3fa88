#include "ccmrce/simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ccmrce/errors.hpp"
#include "ccmrce/rng.hpp"

namespace ccmrce {

void SimConfig::validate() const {
    if (p < 1 || q < 1 || n < 1) {
        throw std::invalid_argument("SimConfig: dimensions must be at least 1");
    }
    if (!(density > 0.0 && density <= 1.0)) {
        throw std::invalid_argument("SimConfig: density must be in (0, 1]");
    }
    if (s1 < 0.0 || s1 > 1.0 || s2 < 0.0 || s2 > 1.0) {
        throw std::invalid_argument("SimConfig: probabilities must be in [0, 1]");
    }
    if (!(t_dof > 2.0)) {
        throw std::invalid_argument("SimConfig: t_dof must exceed 2 for a finite covariance");
    }
    if (std::abs(ar_coef) >= 1.0) {
        throw std::invalid_argument("SimConfig: |ar_coef| must be below 1");
    }
    if (cond_cap < 0.0 || (cond_cap > 0.0 && cond_cap <= 1.0)) {
        throw std::invalid_argument("SimConfig: cond_cap must be 0 (off) or above 1");
    }
}

bool is_positive_definite(const SymMatrix& s) {
    Eigen::LLT<Matrix> llt(s.mat());
    return llt.info() == Eigen::Success;
}

SymMatrix spd_inverse(const SymMatrix& s) {
    Eigen::LLT<Matrix> llt(s.mat());
    if (llt.info() != Eigen::Success) {
        throw DataError("spd_inverse: matrix is not positive definite");
    }
    Matrix inv = llt.solve(Matrix::Identity(s.dim(), s.dim()));
    return SymMatrix::from_symmetrized(inv);
}

double sym_condition_number(const SymMatrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s.mat(), Eigen::EigenvaluesOnly);
    const Vector ev = eig.eigenvalues().cwiseAbs();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

namespace {

double offdiag_density(const SymMatrix& m) {
    const Index p = m.dim();
    if (p < 2) return 0.0;
    Index nonzero = 0;
    for (Index j = 0; j < p; ++j) {
        for (Index k = j + 1; k < p; ++k) {
            if (m(j, k) != 0.0) ++nonzero;
        }
    }
    return static_cast<double>(nonzero) / (0.5 * static_cast<double>(p) * static_cast<double>(p - 1));
}

Matrix cholesky_lower(const SymMatrix& s, const char* what) {
    Eigen::LLT<Matrix> llt(s.mat());
    if (llt.info() != Eigen::Success) {
        throw DataError(std::string(what) + ": covariance is not positive definite");
    }
    return llt.matrixL();
}

Matrix standard_normal_matrix(Index rows, Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            m(i, j) = rng.normal();
        }
    }
    return m;
}

}  // namespace

OmegaInfo gen_omega0(Index p, double density, std::uint64_t seed, double cond_cap) {
    if (!(density > 0.0 && density <= 1.0)) {
        throw std::invalid_argument("gen_omega0: density must be in (0, 1]");
    }
    Rng rng(seed);
    const int max_resamples = 100;
    const double band = 0.02;

    // Initial guess for L's off-diagonal fill from the first-order fill-in
    // estimate density ~ l + (p/3) l^2.
    double l_fill = density / (1.0 + static_cast<double>(p) * density / 3.0);
    double last_achieved = -1.0;

    for (int attempt = 1; attempt <= max_resamples; ++attempt) {
        Matrix l = Matrix::Zero(p, p);
        for (Index j = 0; j < p; ++j) {
            l(j, j) = rng.uniform(0.5, 1.5);
            for (Index k = 0; k < j; ++k) {
                if (rng.bernoulli(l_fill)) l(j, k) = rng.uniform(-1.0, 1.0) * 0.5;
            }
        }
        SymMatrix omega = SymMatrix::from_symmetrized(l * l.transpose());
        last_achieved = offdiag_density(omega);
        if (std::abs(last_achieved - density) <= band) {
            OmegaInfo info;
            if (cond_cap > 1.0) {
                Eigen::SelfAdjointEigenSolver<Matrix> eig(omega.mat(), Eigen::EigenvaluesOnly);
                const double lo = eig.eigenvalues().minCoeff();
                const double hi = eig.eigenvalues().maxCoeff();
                if (lo > 0.0 && hi / lo > cond_cap) {
                    const double delta = (hi - cond_cap * lo) / (cond_cap - 1.0);
                    Matrix inflated = omega.mat();
                    inflated.diagonal().array() += delta;
                    omega = SymMatrix(std::move(inflated));
                }
            }
            info.omega = omega;
            info.density_achieved = offdiag_density(omega);
            info.condition_number = sym_condition_number(omega);
            info.resamples = attempt;
            return info;
        }
        // Multiplicative adjustment toward the target fill.
        const double ratio = density / std::max(last_achieved, 1e-4);
        l_fill = std::clamp(l_fill * std::clamp(ratio, 0.5, 2.0), 1e-6, 1.0);
    }
    std::ostringstream os;
    os << "gen_omega0: failed to land within " << band << " of density " << density << " after "
       << max_resamples << " resamples (p=" << p << ", last achieved " << last_achieved << ")";
    throw DataError(os.str());
}

CoefMatrix gen_b0(Index p, Index q, double s1, double s2, std::uint64_t seed) {
    if (s1 < 0.0 || s1 > 1.0 || s2 < 0.0 || s2 > 1.0) {
        throw std::invalid_argument("gen_b0: probabilities must be in [0, 1]");
    }
    Rng rng(seed);
    Matrix w = standard_normal_matrix(p, q, rng);
    Matrix k(p, q);
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < q; ++j) {
            k(i, j) = rng.bernoulli(s1) ? 1.0 : 0.0;
        }
    }
    Vector rows(p);
    for (Index i = 0; i < p; ++i) {
        rows(i) = rng.bernoulli(s2) ? 1.0 : 0.0;
    }
    return w.cwiseProduct(k).array().colwise() * rows.array();
}

Matrix sample_t_noise(Index n, const SymMatrix& sigma, double nu, std::uint64_t seed,
                      bool gaussian) {
    if (!gaussian && !(nu > 2.0)) {
        throw std::invalid_argument("sample_t_noise: nu must exceed 2");
    }
    const Index q = sigma.dim();
    Rng rng(seed);
    Matrix l;
    if (gaussian) {
        l = cholesky_lower(sigma, "sample_t_noise");
    } else {
        // Scale matrix (nu-2)/nu * sigma so the t covariance is exactly sigma.
        SymMatrix scale(((nu - 2.0) / nu) * sigma.mat());
        l = cholesky_lower(scale, "sample_t_noise");
    }
    Matrix e(n, q);
    Vector z(q);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < q; ++j) z(j) = rng.normal();
        Vector row = l * z;
        if (!gaussian) {
            const double chi = rng.chi_squared(nu);
            row *= std::sqrt(nu / chi);
        }
        e.row(i) = row.transpose();
    }
    return e;
}

SimData gen_dataset(const SimConfig& cfg) {
    cfg.validate();
    SimData out;

    OmegaInfo oinfo = gen_omega0(cfg.q, cfg.density, mix_seed(cfg.seed, 1), cfg.cond_cap);
    out.omega0 = oinfo.omega;
    out.density_achieved = oinfo.density_achieved;
    out.condition_number = oinfo.condition_number;

    out.b0 = gen_b0(cfg.p, cfg.q, cfg.s1, cfg.s2, mix_seed(cfg.seed, 2));

    Matrix sigma_x(cfg.p, cfg.p);
    for (Index j = 0; j < cfg.p; ++j) {
        for (Index k = 0; k < cfg.p; ++k) {
            sigma_x(j, k) = std::pow(cfg.ar_coef, std::abs(static_cast<double>(j - k)));
        }
    }
    const Matrix lx = cholesky_lower(SymMatrix::from_symmetrized(sigma_x), "gen_dataset");
    Rng rng_x(mix_seed(cfg.seed, 3));
    Matrix x = standard_normal_matrix(cfg.n, cfg.p, rng_x) * lx.transpose();

    Matrix e;
    if (cfg.zero_noise) {
        e = Matrix::Zero(cfg.n, cfg.q);
    } else {
        e = sample_t_noise(cfg.n, spd_inverse(out.omega0), cfg.t_dof, mix_seed(cfg.seed, 4),
                           cfg.gaussian_noise);
    }
    Matrix y = x * out.b0 + e;
    out.data = Dataset(std::move(x), std::move(y));
    return out;
}

Dataset gen_validation(const SimConfig& cfg, const CoefMatrix& b0, const SymMatrix& omega0) {
    cfg.validate();
    if (b0.rows() != cfg.p || b0.cols() != cfg.q || omega0.dim() != cfg.q) {
        throw std::invalid_argument("gen_validation: ground truth dimensions do not match config");
    }
    Matrix sigma_x(cfg.p, cfg.p);
    for (Index j = 0; j < cfg.p; ++j) {
        for (Index k = 0; k < cfg.p; ++k) {
            sigma_x(j, k) = std::pow(cfg.ar_coef, std::abs(static_cast<double>(j - k)));
        }
    }
    const Matrix lx = cholesky_lower(SymMatrix::from_symmetrized(sigma_x), "gen_validation");
    Rng rng_x(mix_seed(cfg.seed, 5));
    Matrix x = standard_normal_matrix(cfg.n, cfg.p, rng_x) * lx.transpose();

    Matrix e;
    if (cfg.zero_noise) {
        e = Matrix::Zero(cfg.n, cfg.q);
    } else {
        e = sample_t_noise(cfg.n, spd_inverse(omega0), cfg.t_dof, mix_seed(cfg.seed, 6),
                           cfg.gaussian_noise);
    }
    Matrix y = x * b0 + e;
    return Dataset(std::move(x), std::move(y));
}

SparsityMask perturb_mask(const SymMatrix& omega0, double extra_ratio, std::uint64_t seed) {
    if (extra_ratio < 0.0) {
        throw std::invalid_argument("perturb_mask: extra_ratio must be nonnegative");
    }
    SparsityMask mask = SparsityMask::from_support(omega0);
    const Index support_pairs = mask.allowed_pair_count();

    std::vector<std::pair<Index, Index>> zero_pairs;
    for (Index j = 0; j < omega0.dim(); ++j) {
        for (Index k = j + 1; k < omega0.dim(); ++k) {
            if (!mask.allowed(j, k)) zero_pairs.emplace_back(j, k);
        }
    }
    const auto extras = static_cast<std::size_t>(
        std::floor(extra_ratio * static_cast<double>(support_pairs)));
    if (extras > zero_pairs.size()) {
        throw DataError("perturb_mask: requested spurious positions exceed available zeros");
    }
    Rng rng(seed);
    rng.shuffle(zero_pairs);
    for (std::size_t i = 0; i < extras; ++i) {
        mask.allow(zero_pairs[i].first, zero_pairs[i].second);
    }
    return mask;
}

}  // namespace ccmrce
