#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ccmrce/types.hpp"

namespace ccmrce {

// Symmetric binary pattern defining the convex set S_M of symmetric matrices
// whose off-diagonal zeros cover the zeros of the mask. The diagonal is always
// allowed: the objective's -log omega_jj term requires a nonzero diagonal.
class SparsityMask {
  public:
    SparsityMask() = default;

    static SparsityMask all_allowed(Index p);

    // Builds from a 0/1 matrix. Rejects asymmetric input; forces the diagonal
    // to allowed and reports it through diagonal_corrected (callers warn).
    static SparsityMask from_matrix(const Matrix& m, bool* diagonal_corrected = nullptr);

    // Mask allowing exactly the nonzero pattern of m (plus the diagonal).
    static SparsityMask from_support(const SymMatrix& m, double threshold = 0.0);

    Index dim() const { return dim_; }
    bool allowed(Index j, Index k) const { return allowed_[static_cast<std::size_t>(j) * dim_ + k]; }
    void allow(Index j, Index k);

    bool all_true() const;
    // Number of allowed off-diagonal unordered pairs.
    Index allowed_pair_count() const;
    Matrix to_matrix() const;  // 0/1 doubles

    bool operator==(const SparsityMask& o) const { return dim_ == o.dim_ && allowed_ == o.allowed_; }

  private:
    Index dim_ = 0;
    std::vector<char> allowed_;  // row-major, diagonal always 1
};

// Closed convex constraint set on the off-diagonal of omega, exposed through
// its Euclidean projection. project() must be idempotent and nonexpansive.
class ConvexConstraint {
  public:
    virtual ~ConvexConstraint() = default;
    virtual Index dim() const = 0;
    virtual Matrix project(const Matrix& gamma) const = 0;
    virtual bool contains(const Matrix& gamma) const = 0;
    virtual std::string describe() const = 0;
};

// S_M: zero out entries at disallowed positions.
class MaskConstraint final : public ConvexConstraint {
  public:
    explicit MaskConstraint(SparsityMask mask) : mask_(std::move(mask)) {}

    Index dim() const override { return mask_.dim(); }
    Matrix project(const Matrix& gamma) const override;
    bool contains(const Matrix& gamma) const override;
    std::string describe() const override;

    const SparsityMask& mask() const { return mask_; }

  private:
    SparsityMask mask_;
};

// The trivial constraint (projection is the identity).
std::unique_ptr<ConvexConstraint> make_all_allowed(Index p);

// --- Projections -----------------------------------------------------------

// P_C for C = S_M: keep allowed entries, zero the rest.
SymMatrix project_mask(const SymMatrix& gamma, const SparsityMask& mask);

// P_{C perp} = I - P_C: entries at disallowed positions, zeros elsewhere.
SymMatrix project_complement(const SymMatrix& gamma, const SparsityMask& mask);

// Entrywise projection into the L-infinity ball: sign(h) * min(|h|, 1).
Matrix linf_ball_project(const Matrix& h);
SymMatrix linf_ball_project(const SymMatrix& h);

// Line-graph incidence mask: one variable per edge; two edges may have a
// nonzero partial correlation only if they share an endpoint. Edges must be
// distinct unordered pairs of nodes below num_nodes.
SparsityMask build_incidence_mask(Index num_nodes,
                                  const std::vector<std::pair<Index, Index>>& edges);

}  // namespace ccmrce
