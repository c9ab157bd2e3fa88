#include "ccmrce/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ccmrce/errors.hpp"
#include "ccmrce/rng.hpp"

namespace ccmrce {

double mse_percentage(const Matrix& y_true, const Matrix& y_pred) {
    if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols()) {
        throw std::invalid_argument("mse_percentage: dimension mismatch");
    }
    const Vector col_means = y_true.colwise().mean();
    const double denom = (y_true.rowwise() - col_means.transpose()).squaredNorm();
    if (denom <= 0.0) {
        throw DataError("mse_percentage: Y_true has zero variance");
    }
    return 100.0 * (y_true - y_pred).squaredNorm() / denom;
}

namespace {

// Continued fraction for the incomplete beta (Numerical Recipes style
// modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("reg_incomplete_beta: a and b must be positive");
    }
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - bt * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) {
        throw std::invalid_argument("student_t_two_sided_p: df must be positive");
    }
    if (!std::isfinite(t)) return 0.0;
    return reg_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

PearsonResult pearson_r(const Matrix& y_true, const Matrix& y_pred) {
    if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols()) {
        throw std::invalid_argument("pearson_r: dimension mismatch");
    }
    const long m = static_cast<long>(y_true.size());
    if (m < 3) {
        throw DataError("pearson_r: at least 3 paired values required");
    }
    const double mx = y_true.mean();
    const double my = y_pred.mean();
    const Matrix dx = y_true.array() - mx;
    const Matrix dy = y_pred.array() - my;
    const double sxx = dx.squaredNorm();
    const double syy = dy.squaredNorm();
    if (sxx <= 0.0 || syy <= 0.0) {
        throw DataError("pearson_r: correlation undefined for constant input");
    }
    PearsonResult res;
    res.m = m;
    res.r = std::clamp(dx.cwiseProduct(dy).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(m - 2);
    const double one_minus_r2 = 1.0 - res.r * res.r;
    if (one_minus_r2 <= 0.0) {
        res.p_value = 0.0;
    } else {
        res.p_value = student_t_two_sided_p(res.r * std::sqrt(df / one_minus_r2), df);
    }
    return res;
}

Confusion support_confusion(const Matrix& estimate, const Matrix& truth, double threshold,
                            SupportMode mode) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
        throw std::invalid_argument("support_confusion: dimension mismatch");
    }
    if (threshold < 0.0) {
        throw std::invalid_argument("support_confusion: threshold must be nonnegative");
    }
    Confusion c;
    auto tally = [&](Index j, Index k) {
        const bool sel = std::abs(estimate(j, k)) > threshold;
        const bool tru = std::abs(truth(j, k)) > threshold;
        if (sel && tru) ++c.tp;
        else if (sel && !tru) ++c.fp;
        else if (!sel && tru) ++c.fn;
        else ++c.tn;
    };
    if (mode == SupportMode::OffDiagonalPairs) {
        if (estimate.rows() != estimate.cols()) {
            throw std::invalid_argument("support_confusion: pair mode requires square matrices");
        }
        for (Index j = 0; j < estimate.rows(); ++j) {
            for (Index k = j + 1; k < estimate.cols(); ++k) tally(j, k);
        }
    } else {
        for (Index j = 0; j < estimate.rows(); ++j) {
            for (Index k = 0; k < estimate.cols(); ++k) tally(j, k);
        }
    }
    return c;
}

namespace {

RocPoint point_from_confusion(const Confusion& c, double l1, double l2) {
    RocPoint pt;
    pt.lambda1 = l1;
    pt.lambda2 = l2;
    pt.fpr = (c.fp + c.tn) > 0 ? static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn) : 0.0;
    pt.tpr = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    return pt;
}

void sort_curve(std::vector<RocPoint>& pts) {
    std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
        if (a.fpr != b.fpr) return a.fpr < b.fpr;
        return a.tpr < b.tpr;
    });
    pts.insert(pts.begin(), RocPoint{0.0, 0.0, 0.0, 0.0});
}

}  // namespace

RocCurves roc_from_sweep(const std::vector<FitResult>& fits, const SymMatrix& truth_omega,
                         const CoefMatrix& truth_b) {
    std::size_t usable = 0;
    RocCurves curves;
    for (const FitResult& fit : fits) {
        if (!fit.error.empty()) continue;
        ++usable;
        curves.omega.push_back(point_from_confusion(
            support_confusion(fit.omega.mat(), truth_omega.mat(), kSupportThreshold,
                              SupportMode::OffDiagonalPairs),
            fit.lambda1, fit.lambda2));
        curves.b.push_back(point_from_confusion(
            support_confusion(fit.B, truth_b, kSupportThreshold, SupportMode::AllEntries),
            fit.lambda1, fit.lambda2));
    }
    if (usable < 2) {
        throw DataError("roc_from_sweep: at least 2 usable fits required");
    }
    sort_curve(curves.omega);
    sort_curve(curves.b);
    return curves;
}

double relative_auc(const std::vector<RocPoint>& curve, double fpr_cap) {
    if (curve.empty()) {
        throw std::invalid_argument("relative_auc: curve must be nonempty");
    }
    if (!(fpr_cap > 0.0)) {
        throw std::invalid_argument("relative_auc: fpr_cap must be positive");
    }
    std::vector<RocPoint> pts = curve;
    std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
        if (a.fpr != b.fpr) return a.fpr < b.fpr;
        return a.tpr < b.tpr;
    });

    // Upper-left envelope: running max of tpr, one point per distinct fpr.
    std::vector<std::pair<double, double>> env;
    double best_tpr = 0.0;
    for (const RocPoint& pt : pts) {
        if (pt.fpr > fpr_cap) break;  // beyond the cap: extend horizontally below
        best_tpr = std::max(best_tpr, pt.tpr);
        if (!env.empty() && env.back().first == pt.fpr) {
            env.back().second = best_tpr;
        } else {
            env.emplace_back(pt.fpr, best_tpr);
        }
    }
    if (env.empty() || env.front().first > 0.0) {
        env.insert(env.begin(), {0.0, 0.0});
    }

    double area = 0.0;
    for (std::size_t i = 1; i < env.size(); ++i) {
        area += 0.5 * (env[i].second + env[i - 1].second) * (env[i].first - env[i - 1].first);
    }
    area += env.back().second * (fpr_cap - env.back().first);
    return area / fpr_cap;
}

std::vector<double> log_grid(double lo_exp, double hi_exp, int count) {
    if (count < 1) {
        throw std::invalid_argument("log_grid: count must be positive");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        out.push_back(std::pow(10.0, lo_exp));
        return out;
    }
    for (int i = 0; i < count; ++i) {
        const double e = lo_exp + (hi_exp - lo_exp) * static_cast<double>(i) /
                                      static_cast<double>(count - 1);
        out.push_back(std::pow(10.0, e));
    }
    return out;
}

std::vector<std::pair<double, double>> grid_cells(const std::vector<double>& lambda1s,
                                                  const std::vector<double>& lambda2s) {
    std::vector<std::pair<double, double>> cells;
    cells.reserve(lambda1s.size() * lambda2s.size());
    for (double l1 : lambda1s) {
        for (double l2 : lambda2s) cells.emplace_back(l1, l2);
    }
    return cells;
}

std::vector<FitResult> grid_sweep(const Dataset& data,
                                  const std::vector<std::pair<double, double>>& cells,
                                  const ConvexConstraint* constraint, const AltOptions& opts,
                                  int threads) {
    if (cells.empty()) {
        throw std::invalid_argument("grid_sweep: grid must be nonempty");
    }
    std::vector<FitResult> results(cells.size());
    auto run_cell = [&](std::size_t i) {
        const auto [l1, l2] = cells[i];
        try {
            results[i] = constraint ? fit_cc_mrce(data, l1, l2, *constraint, opts)
                                    : fit_concord_mrce(data, l1, l2, opts);
        } catch (const std::exception& e) {
            results[i] = FitResult{};
            results[i].lambda1 = l1;
            results[i].lambda2 = l2;
            results[i].error = e.what();
        }
    };

    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) return;
                    run_cell(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return results;
}

namespace {

Dataset subset_rows(const Dataset& data, const std::vector<Index>& rows) {
    Matrix x(static_cast<Index>(rows.size()), data.p());
    Matrix y(static_cast<Index>(rows.size()), data.q());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        x.row(static_cast<Index>(i)) = data.X.row(rows[i]);
        y.row(static_cast<Index>(i)) = data.Y.row(rows[i]);
    }
    return Dataset(std::move(x), std::move(y));
}

}  // namespace

CvReport cross_validate(const Dataset& data, int folds,
                        const std::vector<std::pair<double, double>>& cells,
                        const ConvexConstraint* constraint, const AltOptions& opts,
                        std::uint64_t seed, int threads, int overlap_min_count) {
    if (folds < 2) {
        throw std::invalid_argument("cross_validate: at least 2 folds required");
    }
    if (static_cast<Index>(folds) > data.n()) {
        throw DataError("cross_validate: more folds than samples");
    }
    if (cells.empty()) {
        throw std::invalid_argument("cross_validate: grid must be nonempty");
    }

    // Seeded permutation, contiguous chunks; sizes differ by at most one.
    std::vector<Index> perm(static_cast<std::size_t>(data.n()));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Index>(i);
    Rng rng(seed);
    rng.shuffle(perm);

    const Index base = data.n() / folds;
    const Index rem = data.n() % folds;

    CvReport report;
    report.folds = folds;

    struct FoldData {
        Dataset train;
        Dataset val;
        std::vector<Index> val_rows;
        bool usable = true;
    };
    std::vector<FoldData> fold_data(static_cast<std::size_t>(folds));

    Index cursor = 0;
    for (int f = 0; f < folds; ++f) {
        const Index size = base + (f < rem ? 1 : 0);
        std::vector<Index> val_rows(perm.begin() + cursor, perm.begin() + cursor + size);
        cursor += size;
        std::vector<Index> train_rows;
        train_rows.reserve(static_cast<std::size_t>(data.n() - size));
        for (Index i = 0; i < data.n(); ++i) {
            if (std::find(val_rows.begin(), val_rows.end(), perm[static_cast<std::size_t>(i)]) ==
                val_rows.end()) {
                train_rows.push_back(perm[static_cast<std::size_t>(i)]);
            }
        }
        auto& fd = fold_data[static_cast<std::size_t>(f)];
        fd.val_rows = val_rows;
        if (train_rows.size() < 2) {
            fd.usable = false;
            std::ostringstream os;
            os << "fold " << f << " skipped: training split too small to fit";
            report.warnings.push_back(os.str());
            continue;
        }
        fd.train = subset_rows(data, train_rows);
        fd.val = subset_rows(data, val_rows);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    // fits[f][cell]; val_mse[f][cell]
    std::vector<std::vector<FitResult>> fits(static_cast<std::size_t>(folds));
    std::vector<std::vector<double>> val_mse(
        static_cast<std::size_t>(folds), std::vector<double>(cells.size(), nan));

    for (int f = 0; f < folds; ++f) {
        auto& fd = fold_data[static_cast<std::size_t>(f)];
        if (!fd.usable) continue;
        fits[static_cast<std::size_t>(f)] = grid_sweep(fd.train, cells, constraint, opts, threads);
        for (std::size_t cidx = 0; cidx < cells.size(); ++cidx) {
            const FitResult& fit = fits[static_cast<std::size_t>(f)][cidx];
            if (!fit.error.empty()) {
                std::ostringstream os;
                os << "fold " << f << " cell " << cidx << " failed: " << fit.error;
                report.warnings.push_back(os.str());
                continue;
            }
            try {
                val_mse[static_cast<std::size_t>(f)][cidx] =
                    mse_percentage(fd.val.Y, fd.val.X * fit.B);
            } catch (const DataError& e) {
                std::ostringstream os;
                os << "fold " << f << " cell " << cidx << ": " << e.what();
                report.warnings.push_back(os.str());
            }
        }
    }

    // Choose the cell with the smallest mean validation MSE over valid folds.
    std::size_t best_cell = 0;
    double best_mean = std::numeric_limits<double>::infinity();
    for (std::size_t cidx = 0; cidx < cells.size(); ++cidx) {
        std::vector<double> vals;
        for (int f = 0; f < folds; ++f) {
            const double v = val_mse[static_cast<std::size_t>(f)][cidx];
            if (std::isfinite(v)) vals.push_back(v);
        }
        if (vals.empty()) continue;
        const double m = mean_of(vals);
        if (m < best_mean) {
            best_mean = m;
            best_cell = cidx;
        }
    }
    if (!std::isfinite(best_mean)) {
        report.warnings.push_back("no grid cell produced a valid validation score; defaulting to cell 0");
    }
    report.chosen_lambda1 = cells[best_cell].first;
    report.chosen_lambda2 = cells[best_cell].second;

    std::vector<double> vm, vr, tm;
    for (int f = 0; f < folds; ++f) {
        auto& fd = fold_data[static_cast<std::size_t>(f)];
        CvFold fold;
        fold.validation_rows = fd.val_rows;
        fold.valid = fd.usable;
        if (fd.usable) {
            const FitResult& fit = fits[static_cast<std::size_t>(f)][best_cell];
            if (fit.error.empty()) {
                const Matrix yhat_train = fd.train.X * fit.B;
                const Matrix yhat_val = fd.val.X * fit.B;
                try {
                    fold.train_mse = mse_percentage(fd.train.Y, yhat_train);
                    fold.train_r = pearson_r(fd.train.Y, yhat_train).r;
                } catch (const DataError&) {
                    fold.train_mse = nan;
                    fold.train_r = nan;
                }
                const double v = val_mse[static_cast<std::size_t>(f)][best_cell];
                fold.val_mse = v;
                try {
                    fold.val_r = pearson_r(fd.val.Y, yhat_val).r;
                } catch (const DataError&) {
                    fold.val_r = nan;
                }
                fold.valid = std::isfinite(v);
                report.fold_b.push_back(fit.B);
            } else {
                fold.valid = false;
            }
        }
        if (fold.valid) {
            vm.push_back(fold.val_mse);
            tm.push_back(fold.train_mse);
            if (std::isfinite(fold.val_r)) vr.push_back(fold.val_r);
        }
        report.per_fold.push_back(std::move(fold));
    }

    report.val_mse_mean = mean_of(vm);
    report.val_mse_sd = sample_sd(vm);
    report.val_r_mean = mean_of(vr);
    report.val_r_sd = sample_sd(vr);
    report.train_mse_mean = mean_of(tm);
    report.train_mse_sd = sample_sd(tm);

    if (!report.fold_b.empty()) {
        const int mc = std::min<int>(overlap_min_count, static_cast<int>(report.fold_b.size()));
        OverlapResult ov = support_overlap(report.fold_b, mc);
        report.overlap_ratio = ov.overlap_ratio;
        report.overlap_union_empty = ov.union_empty;
    }
    return report;
}

OverlapResult support_overlap(const std::vector<CoefMatrix>& b_list, int min_count) {
    if (b_list.empty()) {
        throw std::invalid_argument("support_overlap: list must be nonempty");
    }
    if (min_count < 0 || static_cast<std::size_t>(min_count) > b_list.size()) {
        throw std::invalid_argument("support_overlap: min_count must be within the list size");
    }
    const Index rows = b_list.front().rows();
    const Index cols = b_list.front().cols();
    for (const CoefMatrix& b : b_list) {
        if (b.rows() != rows || b.cols() != cols) {
            throw std::invalid_argument("support_overlap: inconsistent dimensions");
        }
    }
    Matrix counts = Matrix::Zero(rows, cols);
    for (const CoefMatrix& b : b_list) {
        counts += (b.cwiseAbs().array() > kSupportThreshold).cast<double>().matrix();
    }
    OverlapResult res;
    res.common_support = (counts.array() > static_cast<double>(min_count)).cast<double>().matrix();
    const double common = res.common_support.sum();
    const double uni = (counts.array() >= 1.0).cast<double>().sum();
    if (uni == 0.0) {
        res.union_empty = true;
        res.overlap_ratio = 0.0;
    } else {
        res.overlap_ratio = common / uni;
    }
    return res;
}

}  // namespace ccmrce
