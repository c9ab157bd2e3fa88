#include "ccmrce/constraints.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ccmrce/errors.hpp"

namespace ccmrce {

SparsityMask SparsityMask::all_allowed(Index p) {
    SparsityMask m;
    m.dim_ = p;
    m.allowed_.assign(static_cast<std::size_t>(p) * p, 1);
    return m;
}

SparsityMask SparsityMask::from_matrix(const Matrix& m, bool* diagonal_corrected) {
    if (m.rows() != m.cols()) {
        throw DataError("SparsityMask: pattern must be square");
    }
    bool corrected = false;
    SparsityMask mask;
    mask.dim_ = m.rows();
    mask.allowed_.assign(static_cast<std::size_t>(mask.dim_) * mask.dim_, 0);
    for (Index j = 0; j < mask.dim_; ++j) {
        if (m(j, j) == 0.0) corrected = true;
        mask.allowed_[static_cast<std::size_t>(j) * mask.dim_ + j] = 1;
        for (Index k = j + 1; k < mask.dim_; ++k) {
            if ((m(j, k) != 0.0) != (m(k, j) != 0.0)) {
                throw DataError("SparsityMask: pattern must be symmetric");
            }
            const char v = m(j, k) != 0.0 ? 1 : 0;
            mask.allowed_[static_cast<std::size_t>(j) * mask.dim_ + k] = v;
            mask.allowed_[static_cast<std::size_t>(k) * mask.dim_ + j] = v;
        }
    }
    if (diagonal_corrected) *diagonal_corrected = corrected;
    return mask;
}

SparsityMask SparsityMask::from_support(const SymMatrix& m, double threshold) {
    SparsityMask mask;
    mask.dim_ = m.dim();
    mask.allowed_.assign(static_cast<std::size_t>(mask.dim_) * mask.dim_, 0);
    for (Index j = 0; j < mask.dim_; ++j) {
        mask.allowed_[static_cast<std::size_t>(j) * mask.dim_ + j] = 1;
        for (Index k = j + 1; k < mask.dim_; ++k) {
            if (std::abs(m(j, k)) > threshold) {
                mask.allowed_[static_cast<std::size_t>(j) * mask.dim_ + k] = 1;
                mask.allowed_[static_cast<std::size_t>(k) * mask.dim_ + j] = 1;
            }
        }
    }
    return mask;
}

void SparsityMask::allow(Index j, Index k) {
    allowed_[static_cast<std::size_t>(j) * dim_ + k] = 1;
    allowed_[static_cast<std::size_t>(k) * dim_ + j] = 1;
}

bool SparsityMask::all_true() const {
    return std::all_of(allowed_.begin(), allowed_.end(), [](char c) { return c != 0; });
}

Index SparsityMask::allowed_pair_count() const {
    Index count = 0;
    for (Index j = 0; j < dim_; ++j) {
        for (Index k = j + 1; k < dim_; ++k) {
            if (allowed(j, k)) ++count;
        }
    }
    return count;
}

Matrix SparsityMask::to_matrix() const {
    Matrix m(dim_, dim_);
    for (Index j = 0; j < dim_; ++j) {
        for (Index k = 0; k < dim_; ++k) {
            m(j, k) = allowed(j, k) ? 1.0 : 0.0;
        }
    }
    return m;
}

Matrix MaskConstraint::project(const Matrix& gamma) const {
    if (gamma.rows() != mask_.dim() || gamma.cols() != mask_.dim()) {
        throw std::invalid_argument("MaskConstraint: dimension mismatch");
    }
    Matrix out = gamma;
    for (Index j = 0; j < mask_.dim(); ++j) {
        for (Index k = 0; k < mask_.dim(); ++k) {
            if (!mask_.allowed(j, k)) out(j, k) = 0.0;
        }
    }
    return out;
}

bool MaskConstraint::contains(const Matrix& gamma) const {
    if (gamma.rows() != mask_.dim() || gamma.cols() != mask_.dim()) return false;
    for (Index j = 0; j < mask_.dim(); ++j) {
        for (Index k = 0; k < mask_.dim(); ++k) {
            if (!mask_.allowed(j, k) && gamma(j, k) != 0.0) return false;
        }
    }
    return true;
}

std::string MaskConstraint::describe() const {
    if (mask_.all_true()) return "all-allowed";
    std::ostringstream os;
    os << "mask(dim=" << mask_.dim() << ",pairs=" << mask_.allowed_pair_count() << ")";
    return os.str();
}

std::unique_ptr<ConvexConstraint> make_all_allowed(Index p) {
    return std::make_unique<MaskConstraint>(SparsityMask::all_allowed(p));
}

SymMatrix project_mask(const SymMatrix& gamma, const SparsityMask& mask) {
    if (gamma.dim() != mask.dim()) {
        throw std::invalid_argument("project_mask: dimension mismatch");
    }
    return SymMatrix(MaskConstraint(mask).project(gamma.mat()));
}

SymMatrix project_complement(const SymMatrix& gamma, const SparsityMask& mask) {
    if (gamma.dim() != mask.dim()) {
        throw std::invalid_argument("project_complement: dimension mismatch");
    }
    Matrix out = Matrix::Zero(gamma.dim(), gamma.dim());
    for (Index j = 0; j < gamma.dim(); ++j) {
        for (Index k = 0; k < gamma.dim(); ++k) {
            if (!mask.allowed(j, k)) out(j, k) = gamma(j, k);
        }
    }
    return SymMatrix(std::move(out));
}

Matrix linf_ball_project(const Matrix& h) {
    return h.unaryExpr([](double v) { return std::clamp(v, -1.0, 1.0); });
}

SymMatrix linf_ball_project(const SymMatrix& h) {
    return SymMatrix(linf_ball_project(h.mat()));
}

SparsityMask build_incidence_mask(Index num_nodes,
                                  const std::vector<std::pair<Index, Index>>& edges) {
    std::set<std::pair<Index, Index>> seen;
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= num_nodes || b >= num_nodes) {
            throw DataError("build_incidence_mask: edge endpoint out of range");
        }
        if (a == b) {
            throw DataError("build_incidence_mask: self-loops are not valid edges");
        }
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second) {
            throw DataError("build_incidence_mask: duplicate edge");
        }
    }
    const Index m = static_cast<Index>(edges.size());
    SparsityMask mask;
    mask = SparsityMask::from_matrix(Matrix::Identity(m, m));
    for (Index j = 0; j < m; ++j) {
        for (Index k = j + 1; k < m; ++k) {
            const auto& e = edges[static_cast<std::size_t>(j)];
            const auto& f = edges[static_cast<std::size_t>(k)];
            if (e.first == f.first || e.first == f.second || e.second == f.first ||
                e.second == f.second) {
                mask.allow(j, k);
            }
        }
    }
    return mask;
}

}  // namespace ccmrce
