// Command-line interface: simulate datasets, fit CONCORD-MRCE / CC-MRCE
// models, predict, evaluate, sweep hyperparameter grids and run k-fold CV.
// Exit codes: 0 success, 64 usage error, 65 data error, 2 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ccmrce/alternating.hpp"
#include "ccmrce/errors.hpp"
#include "ccmrce/evaluate.hpp"
#include "ccmrce/io.hpp"
#include "ccmrce/rng.hpp"
#include "ccmrce/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ccmrce;

namespace {

struct GridOptions {
    std::string grid_log;          // "LO:HI:COUNT", both axes
    std::string lambda1_list;      // comma-separated values
    std::string lambda2_list;
};

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string cell =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw CLI::ValidationError(what, "unparsable value '" + cell + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<std::pair<double, double>> build_grid(const GridOptions& opts) {
    if (!opts.grid_log.empty()) {
        const std::size_t c1 = opts.grid_log.find(':');
        const std::size_t c2 = c1 == std::string::npos ? std::string::npos
                                                       : opts.grid_log.find(':', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw CLI::ValidationError("--grid-log", "expected LO:HI:COUNT");
        }
        try {
            const double lo = std::stod(opts.grid_log.substr(0, c1));
            const double hi = std::stod(opts.grid_log.substr(c1 + 1, c2 - c1 - 1));
            const int count = std::stoi(opts.grid_log.substr(c2 + 1));
            const auto axis = log_grid(lo, hi, count);
            return grid_cells(axis, axis);
        } catch (const CLI::Error&) {
            throw;
        } catch (const std::exception& e) {
            throw CLI::ValidationError("--grid-log", e.what());
        }
    }
    if (!opts.lambda1_list.empty() && !opts.lambda2_list.empty()) {
        return grid_cells(parse_double_list(opts.lambda1_list, "--lambda1-list"),
                          parse_double_list(opts.lambda2_list, "--lambda2-list"));
    }
    throw CLI::ValidationError("grid", "specify --grid-log or both --lambda1-list/--lambda2-list");
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("CCMRCE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

void add_solver_flags(CLI::App* cmd, AltOptions& opts) {
    cmd->add_option("--alt-max-iter", opts.max_outer_iter, "outer alternation cap");
    cmd->add_option("--tol-rel", opts.tol_rel, "outer relative tolerance");
    cmd->add_option("--omega-max-iter", opts.solver.max_outer_iter, "omega FISTA iteration cap");
    cmd->add_option("--dual-max-iter", opts.solver.max_inner_iter, "dual FISTA iteration cap");
    cmd->add_option("--dual-tol", opts.solver.tol_dual, "dual relative tolerance");
    cmd->add_option("--initial-step", opts.solver.initial_step, "FISTA trial step");
    cmd->add_option("--backtrack-factor", opts.solver.backtrack_factor, "line search shrink factor");
    cmd->add_flag("--dual-constant-step", opts.solver.dual_constant_step,
                  "use the Lipschitz-bound constant dual step");
}

std::optional<SparsityMask> load_mask(const std::string& path, Index q) {
    if (path.empty()) return std::nullopt;
    bool corrected = false;
    SparsityMask mask = read_mask_csv(path, &corrected);
    if (corrected) {
        std::cerr << "warning: " << path
                  << " marks diagonal entries as constrained; the diagonal is always allowed\n";
    }
    if (mask.dim() != q) {
        throw DataError(path + ": mask dimension does not match the response dimension");
    }
    return mask;
}

Model model_from_fit(const FitResult& fit, bool centered, const Vector& x_means,
                     const Vector& y_means) {
    Model m;
    m.B = fit.B;
    m.omega = fit.omega;
    m.objective_trace = fit.objective_trace;
    m.outer_iters = fit.outer_iters;
    m.converged = fit.converged;
    m.lambda1 = fit.lambda1;
    m.lambda2 = fit.lambda2;
    m.constraint_id = fit.constraint_id;
    m.centered = centered;
    m.x_means = x_means;
    m.y_means = y_means;
    return m;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string out_dir;
    SimConfig cfg;
    bool validation = false;
};

int cmd_simulate(const SimulateArgs& args) {
    args.cfg.validate();
    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + args.out_dir + ": " + ec.message());
    }
    const SimData sim = gen_dataset(args.cfg);
    const auto path = [&](const char* name) { return (fs::path(args.out_dir) / name).string(); };

    write_csv_matrix(path("X.csv"), sim.data.X);
    write_csv_matrix(path("Y.csv"), sim.data.Y);
    write_csv_matrix(path("B0.csv"), sim.b0);
    write_csv_matrix(path("Omega0.csv"), sim.omega0.mat());

    const std::uint64_t mask_seed = mix_seed(args.cfg.seed, 7);
    write_mask_csv(path("mask_perfect.csv"), perturb_mask(sim.omega0, 0.0, mask_seed));
    write_mask_csv(path("mask_snr2.csv"), perturb_mask(sim.omega0, 0.5, mask_seed));
    write_mask_csv(path("mask_snr1.csv"), perturb_mask(sim.omega0, 1.0, mask_seed));

    if (args.validation) {
        const Dataset val = gen_validation(args.cfg, sim.b0, sim.omega0);
        write_csv_matrix(path("X_val.csv"), val.X);
        write_csv_matrix(path("Y_val.csv"), val.Y);
    }

    json meta;
    meta["format"] = 1;
    meta["seed"] = args.cfg.seed;
    meta["p"] = args.cfg.p;
    meta["q"] = args.cfg.q;
    meta["n"] = args.cfg.n;
    meta["density_target"] = args.cfg.density;
    meta["density_achieved"] = sim.density_achieved;
    meta["condition_number"] = sim.condition_number;
    meta["s1"] = args.cfg.s1;
    meta["s2"] = args.cfg.s2;
    meta["t_dof"] = args.cfg.t_dof;
    meta["ar_coef"] = args.cfg.ar_coef;
    meta["gaussian_noise"] = args.cfg.gaussian_noise;
    meta["zero_noise"] = args.cfg.zero_noise;
    write_json_file(path("meta.json"), meta);
    return 0;
}

// --- fit ---------------------------------------------------------------------

struct FitArgs {
    std::string x_path, y_path, mask_path;
    std::string out_path = "model.json";
    double lambda1 = -1.0, lambda2 = -1.0;
    bool center = false;
    AltOptions opts;
};

int cmd_fit(const FitArgs& args) {
    Matrix x = read_csv_matrix(args.x_path);
    Matrix y = read_csv_matrix(args.y_path);
    if (x.rows() != y.rows()) {
        throw DataError("fit: X and Y row counts differ");
    }
    Vector x_means = Vector::Zero(0);
    Vector y_means = Vector::Zero(0);
    if (args.center) {
        x_means = x.colwise().mean();
        y_means = y.colwise().mean();
        x.rowwise() -= x_means.transpose();
        y.rowwise() -= y_means.transpose();
    }
    const Dataset data(std::move(x), std::move(y));
    const auto mask = load_mask(args.mask_path, data.q());

    FitResult fit;
    if (mask) {
        const MaskConstraint constraint(*mask);
        fit = fit_cc_mrce(data, args.lambda1, args.lambda2, constraint, args.opts);
    } else {
        fit = fit_concord_mrce(data, args.lambda1, args.lambda2, args.opts);
    }
    write_model_json(args.out_path, model_from_fit(fit, args.center, x_means, y_means));
    if (!fit.converged) {
        std::cerr << "warning: fit did not converge within " << args.opts.max_outer_iter
                  << " outer iterations\n";
    }
    return 0;
}

// --- predict ------------------------------------------------------------------

struct PredictArgs {
    std::string model_path, x_path;
    std::string out_path = "Yhat.csv";
};

int cmd_predict(const PredictArgs& args) {
    const Model model = read_model_json(args.model_path);
    const Matrix x = read_csv_matrix(args.x_path);
    write_csv_matrix(args.out_path, model.predict(x));
    return 0;
}

// --- eval ---------------------------------------------------------------------

struct EvalArgs {
    std::string y_true_path, y_pred_path, model_path, x_path;
    std::string out_path = "report.json";
};

int cmd_eval(const EvalArgs& args) {
    const Matrix y_true = read_csv_matrix(args.y_true_path);
    Matrix y_pred;
    if (!args.y_pred_path.empty()) {
        y_pred = read_csv_matrix(args.y_pred_path);
    } else {
        const Model model = read_model_json(args.model_path);
        y_pred = model.predict(read_csv_matrix(args.x_path));
    }
    if (y_pred.rows() != y_true.rows() || y_pred.cols() != y_true.cols()) {
        throw DataError("eval: prediction and truth dimensions differ");
    }
    const double mse = mse_percentage(y_true, y_pred);
    const PearsonResult pr = pearson_r(y_true, y_pred);

    json report;
    report["format"] = 1;
    report["mse_percentage"] = mse;
    report["pearson_r"] = pr.r;
    report["p_value"] = pr.p_value;
    report["entries"] = pr.m;
    write_json_file(args.out_path, report);
    return 0;
}

// --- sweep ----------------------------------------------------------------------

struct SweepArgs {
    std::string x_path, y_path, mask_path;
    std::string truth_omega_path, truth_b_path;
    std::string x_val_path, y_val_path;
    std::string out_path = "report.json";
    GridOptions grid;
    AltOptions opts;
    int threads = 0;
};

json fit_summary(const FitResult& fit) {
    json cell;
    cell["lambda1"] = fit.lambda1;
    cell["lambda2"] = fit.lambda2;
    if (!fit.error.empty()) {
        cell["error"] = fit.error;
        return cell;
    }
    cell["converged"] = fit.converged;
    cell["outer_iterations"] = fit.outer_iters;
    cell["objective"] = fit.objective_trace.back();
    return cell;
}

json roc_to_json(const std::vector<RocPoint>& pts) {
    json arr = json::array();
    for (const RocPoint& pt : pts) {
        arr.push_back({{"fpr", pt.fpr},
                       {"tpr", pt.tpr},
                       {"lambda1", pt.lambda1},
                       {"lambda2", pt.lambda2}});
    }
    return arr;
}

int cmd_sweep(const SweepArgs& args) {
    const Matrix x = read_csv_matrix(args.x_path);
    const Matrix y = read_csv_matrix(args.y_path);
    const Dataset data(x, y);
    const auto mask = load_mask(args.mask_path, data.q());
    const auto cells = build_grid(args.grid);

    if (args.truth_omega_path.empty() != args.truth_b_path.empty()) {
        throw DataError("sweep: ROC curves need both --truth-omega and --truth-b");
    }
    if (args.x_val_path.empty() != args.y_val_path.empty()) {
        throw DataError("sweep: validation scoring needs both --x-val and --y-val");
    }

    std::optional<MaskConstraint> constraint;
    if (mask) constraint.emplace(*mask);

    const auto fits = grid_sweep(data, cells, constraint ? &*constraint : nullptr, args.opts,
                                 resolve_threads(args.threads));

    json report;
    report["format"] = 1;
    json cell_list = json::array();
    for (const FitResult& fit : fits) cell_list.push_back(fit_summary(fit));
    report["cells"] = cell_list;

    if (!args.x_val_path.empty()) {
        const Matrix x_val = read_csv_matrix(args.x_val_path);
        const Matrix y_val = read_csv_matrix(args.y_val_path);
        if (x_val.cols() != data.p() || y_val.cols() != data.q() || x_val.rows() != y_val.rows()) {
            throw DataError("sweep: validation matrices have mismatched dimensions");
        }
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < fits.size(); ++i) {
            if (!fits[i].error.empty()) continue;
            const double v = mse_percentage(y_val, x_val * fits[i].B);
            report["cells"][i]["val_mse_percentage"] = v;
            if (v < best) {
                best = v;
                best_idx = i;
            }
        }
        if (std::isfinite(best)) {
            report["best_by_val"] = {{"lambda1", fits[best_idx].lambda1},
                                     {"lambda2", fits[best_idx].lambda2},
                                     {"val_mse_percentage", best}};
        }
    }

    if (!args.truth_omega_path.empty()) {
        const SymMatrix truth_omega(read_csv_matrix(args.truth_omega_path));
        const Matrix truth_b = read_csv_matrix(args.truth_b_path);
        if (truth_omega.dim() != data.q() || truth_b.rows() != data.p() ||
            truth_b.cols() != data.q()) {
            throw DataError("sweep: ground-truth dimensions do not match the data");
        }
        const RocCurves curves = roc_from_sweep(fits, truth_omega, truth_b);
        report["roc_omega"] = roc_to_json(curves.omega);
        report["roc_b"] = roc_to_json(curves.b);
        report["relative_auc_omega"] = relative_auc(curves.omega);
        report["relative_auc_b"] = relative_auc(curves.b);
    }

    write_json_file(args.out_path, report);
    return 0;
}

// --- cv -------------------------------------------------------------------------

struct CvArgs {
    std::string x_path, y_path, mask_path;
    std::string out_path = "report.json";
    GridOptions grid;
    AltOptions opts;
    int folds = 10;
    int min_count = 5;
    std::uint64_t seed = 0;
    int threads = 0;
};

int cmd_cv(const CvArgs& args) {
    const Dataset data(read_csv_matrix(args.x_path), read_csv_matrix(args.y_path));
    const auto mask = load_mask(args.mask_path, data.q());
    const auto cells = build_grid(args.grid);

    std::optional<MaskConstraint> constraint;
    if (mask) constraint.emplace(*mask);

    const CvReport cv =
        cross_validate(data, args.folds, cells, constraint ? &*constraint : nullptr, args.opts,
                       args.seed, resolve_threads(args.threads), args.min_count);

    json report;
    report["format"] = 1;
    report["folds"] = cv.folds;
    report["chosen_lambda1"] = cv.chosen_lambda1;
    report["chosen_lambda2"] = cv.chosen_lambda2;
    json fold_list = json::array();
    for (const CvFold& fold : cv.per_fold) {
        json f;
        f["valid"] = fold.valid;
        f["train_mse_percentage"] = fold.train_mse;
        f["val_mse_percentage"] = fold.val_mse;
        f["train_r"] = fold.train_r;
        f["val_r"] = fold.val_r;
        f["validation_rows"] = fold.validation_rows;
        fold_list.push_back(std::move(f));
    }
    report["per_fold"] = fold_list;
    report["val_mse_mean"] = cv.val_mse_mean;
    report["val_mse_sd"] = cv.val_mse_sd;
    report["val_r_mean"] = cv.val_r_mean;
    report["val_r_sd"] = cv.val_r_sd;
    report["train_mse_mean"] = cv.train_mse_mean;
    report["train_mse_sd"] = cv.train_mse_sd;
    report["overlap_ratio"] = cv.overlap_ratio;
    report["overlap_union_empty"] = cv.overlap_union_empty;
    report["warnings"] = cv.warnings;
    write_json_file(args.out_path, report);
    for (const std::string& w : cv.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CC-MRCE: constrained multivariate regression with covariance estimation"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
    sim->add_option("--out", sim_args.out_dir, "output directory")->required();
    sim->add_option("--p", sim_args.cfg.p, "predictor dimension");
    sim->add_option("--q", sim_args.cfg.q, "response dimension");
    sim->add_option("--n", sim_args.cfg.n, "sample count");
    sim->add_option("--density", sim_args.cfg.density, "target omega0 off-diagonal density");
    sim->add_option("--s1", sim_args.cfg.s1, "B0 entry keep probability");
    sim->add_option("--s2", sim_args.cfg.s2, "B0 row keep probability");
    sim->add_option("--t-dof", sim_args.cfg.t_dof, "residual t degrees of freedom");
    sim->add_option("--ar-coef", sim_args.cfg.ar_coef, "predictor AR correlation");
    sim->add_option("--seed", sim_args.cfg.seed, "random seed");
    sim->add_option("--cond-cap", sim_args.cfg.cond_cap, "cap omega0 condition number (0 = off)");
    sim->add_flag("--gaussian-noise", sim_args.cfg.gaussian_noise, "Gaussian residuals");
    sim->add_flag("--zero-noise", sim_args.cfg.zero_noise, "noiseless responses");
    sim->add_flag("--validation", sim_args.validation, "also write a validation replicate");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "fit CONCORD-MRCE (or CC-MRCE with --mask)");
    fit->add_option("--x", fit_args.x_path, "predictor CSV")->required();
    fit->add_option("--y", fit_args.y_path, "response CSV")->required();
    fit->add_option("--lambda1", fit_args.lambda1, "L1 penalty on B")->required();
    fit->add_option("--lambda2", fit_args.lambda2, "L1 penalty on omega")->required();
    fit->add_option("--mask", fit_args.mask_path, "sparsity mask CSV (enables CC-MRCE)");
    fit->add_option("--out", fit_args.out_path, "model output path");
    fit->add_flag("--center", fit_args.center, "subtract column means before fitting");
    add_solver_flags(fit, fit_args.opts);

    PredictArgs pred_args;
    auto* pred = app.add_subcommand("predict", "apply a fitted model");
    pred->add_option("--model", pred_args.model_path, "model.json")->required();
    pred->add_option("--x", pred_args.x_path, "predictor CSV")->required();
    pred->add_option("--out", pred_args.out_path, "prediction output CSV");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "reconstruction metrics");
    eval->add_option("--y-true", eval_args.y_true_path, "ground-truth responses")->required();
    eval->add_option("--y-pred", eval_args.y_pred_path, "predicted responses");
    eval->add_option("--model", eval_args.model_path, "model.json (with --x)");
    eval->add_option("--x", eval_args.x_path, "predictors for --model");
    eval->add_option("--out", eval_args.out_path, "report output path");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "fit a (lambda1, lambda2) grid");
    sweep->add_option("--x", sweep_args.x_path, "predictor CSV")->required();
    sweep->add_option("--y", sweep_args.y_path, "response CSV")->required();
    sweep->add_option("--mask", sweep_args.mask_path, "sparsity mask CSV");
    sweep->add_option("--grid-log", sweep_args.grid.grid_log, "LO:HI:COUNT log grid, both axes");
    sweep->add_option("--lambda1-list", sweep_args.grid.lambda1_list, "explicit lambda1 values");
    sweep->add_option("--lambda2-list", sweep_args.grid.lambda2_list, "explicit lambda2 values");
    sweep->add_option("--truth-omega", sweep_args.truth_omega_path, "ground-truth omega for ROC");
    sweep->add_option("--truth-b", sweep_args.truth_b_path, "ground-truth B for ROC");
    sweep->add_option("--x-val", sweep_args.x_val_path, "validation predictors");
    sweep->add_option("--y-val", sweep_args.y_val_path, "validation responses");
    sweep->add_option("--out", sweep_args.out_path, "report output path");
    sweep->add_option("--threads", sweep_args.threads, "parallel cells (env CCMRCE_THREADS)");
    add_solver_flags(sweep, sweep_args.opts);

    CvArgs cv_args;
    auto* cv = app.add_subcommand("cv", "k-fold cross-validated grid search");
    cv->add_option("--x", cv_args.x_path, "predictor CSV")->required();
    cv->add_option("--y", cv_args.y_path, "response CSV")->required();
    cv->add_option("--mask", cv_args.mask_path, "sparsity mask CSV");
    cv->add_option("--folds", cv_args.folds, "fold count");
    cv->add_option("--grid-log", cv_args.grid.grid_log, "LO:HI:COUNT log grid, both axes");
    cv->add_option("--lambda1-list", cv_args.grid.lambda1_list, "explicit lambda1 values");
    cv->add_option("--lambda2-list", cv_args.grid.lambda2_list, "explicit lambda2 values");
    cv->add_option("--seed", cv_args.seed, "fold assignment seed");
    cv->add_option("--min-count", cv_args.min_count, "overlap threshold (nonzero in > this many folds)");
    cv->add_option("--out", cv_args.out_path, "report output path");
    cv->add_option("--threads", cv_args.threads, "parallel cells (env CCMRCE_THREADS)");
    add_solver_flags(cv, cv_args.opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (fit->parsed()) {
            if (fit_args.lambda1 < 0.0 || fit_args.lambda2 < 0.0) {
                std::cerr << "error: penalties must be nonnegative\n";
                return 64;
            }
            return cmd_fit(fit_args);
        }
        if (pred->parsed()) return cmd_predict(pred_args);
        if (eval->parsed()) {
            if (eval_args.y_pred_path.empty() &&
                (eval_args.model_path.empty() || eval_args.x_path.empty())) {
                std::cerr << "error: eval needs --y-pred or both --model and --x\n";
                return 64;
            }
            return cmd_eval(eval_args);
        }
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        if (cv->parsed()) return cmd_cv(cv_args);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 64;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 65;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 65;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
