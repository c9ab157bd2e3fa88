#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccmrce/alternating.hpp"
#include "ccmrce/types.hpp"

namespace ccmrce {

// Default support threshold: solver zeros are exact, this only guards float dust.
inline constexpr double kSupportThreshold = 1e-8;

// Reconstruction error as a percentage of the response variance:
//   100 * ||Y_true - Y_pred||_F^2 / ||Y_true - colmean(Y_true)||_F^2.
// Values above 100 mean the prediction is worse than the column-mean
// baseline. Throws DataError when Y_true has zero variance.
double mse_percentage(const Matrix& y_true, const Matrix& y_pred);

struct PearsonResult {
    double r = 0.0;
    double p_value = 1.0;
    long m = 0;  // pooled entry count
};

// Pearson correlation over all entries pooled into one vector pair, with the
// two-sided p-value from t = r sqrt((m-2)/(1-r^2)) on m-2 degrees of freedom.
// Throws DataError when either side is constant or fewer than 3 entries.
PearsonResult pearson_r(const Matrix& y_true, const Matrix& y_pred);

// Regularized incomplete beta I_x(a, b) via a Lentz continued fraction; the
// backing evaluation for Student-t tail probabilities.
double reg_incomplete_beta(double a, double b, double x);

// Two-sided p-value of a t statistic on df degrees of freedom.
double student_t_two_sided_p(double t, double df);

enum class SupportMode {
    OffDiagonalPairs,  // omega-type: count unordered off-diagonal pairs
    AllEntries,        // B-type: count every entry
};

struct Confusion {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;
};

// Entries with |value| > threshold count as selected, on both sides.
Confusion support_confusion(const Matrix& estimate, const Matrix& truth, double threshold,
                            SupportMode mode);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

struct RocCurves {
    std::vector<RocPoint> omega;
    std::vector<RocPoint> b;
};

// One (fpr, tpr) point per fit for the omega and B supports, sorted by fpr
// with (0, 0) prepended. Failed cells (nonempty error) are skipped.
RocCurves roc_from_sweep(const std::vector<FitResult>& fits, const SymMatrix& truth_omega,
                         const CoefMatrix& truth_b);

// Trapezoidal area under the upper-left envelope of the curve over
// fpr in [0, fpr_cap], extended horizontally from the last point below the
// cap, divided by fpr_cap.
double relative_auc(const std::vector<RocPoint>& curve, double fpr_cap = 0.2);

// Log-spaced grid 10^lo_exp .. 10^hi_exp with count points.
std::vector<double> log_grid(double lo_exp, double hi_exp, int count);

// Cross product in grid order: one cell per (lambda1, lambda2).
std::vector<std::pair<double, double>> grid_cells(const std::vector<double>& lambda1s,
                                                  const std::vector<double>& lambda2s);

// One independent fit per cell; results follow grid order regardless of the
// execution schedule. Per-cell failures land in FitResult::error.
std::vector<FitResult> grid_sweep(const Dataset& data,
                                  const std::vector<std::pair<double, double>>& cells,
                                  const ConvexConstraint* constraint, const AltOptions& opts,
                                  int threads = 1);

struct CvFold {
    std::vector<Index> validation_rows;
    double train_mse = 0.0;
    double val_mse = 0.0;
    double train_r = 0.0;
    double val_r = 0.0;
    bool valid = true;  // false: fold flagged and excluded from means
};

struct CvReport {
    int folds = 0;
    double chosen_lambda1 = 0.0;
    double chosen_lambda2 = 0.0;
    std::vector<CvFold> per_fold;
    std::vector<CoefMatrix> fold_b;  // fitted B per fold at the chosen cell
    double val_mse_mean = 0.0;
    double val_mse_sd = 0.0;
    double val_r_mean = 0.0;
    double val_r_sd = 0.0;
    double train_mse_mean = 0.0;
    double train_mse_sd = 0.0;
    double overlap_ratio = 0.0;
    bool overlap_union_empty = false;
    std::vector<std::string> warnings;
};

// Seeded k-fold CV (fold sizes differ by at most one; every row in exactly
// one fold). Hyperparameters are chosen by minimum mean validation MSE
// percentage across folds; per-fold stats are reported at the chosen cell.
CvReport cross_validate(const Dataset& data, int folds,
                        const std::vector<std::pair<double, double>>& cells,
                        const ConvexConstraint* constraint, const AltOptions& opts,
                        std::uint64_t seed, int threads = 1, int overlap_min_count = 5);

struct OverlapResult {
    Matrix common_support;  // 0/1, entries nonzero in more than min_count members
    double overlap_ratio = 0.0;
    bool union_empty = false;
};

// |entries nonzero in > min_count members| / |union of supports|.
OverlapResult support_overlap(const std::vector<CoefMatrix>& b_list, int min_count);

}  // namespace ccmrce
