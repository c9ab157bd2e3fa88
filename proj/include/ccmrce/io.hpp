#pragma once

#include <string>
#include <vector>

#include "ccmrce/alternating.hpp"
#include "ccmrce/constraints.hpp"
#include "ccmrce/types.hpp"

#include <json.hpp>

namespace ccmrce {

// CSV matrices are headerless, comma-separated, one row per line. Doubles are
// written with 17 significant digits so write/read round-trips bit-exactly.

Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& m);

// Masks serialize as 0/1 integers. Reading forces the diagonal to allowed;
// diagonal_corrected reports whether the file had to be repaired.
SparsityMask read_mask_csv(const std::string& path, bool* diagonal_corrected = nullptr);
void write_mask_csv(const std::string& path, const SparsityMask& mask);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

// Fitted model written by `fit` and consumed by `predict`/`eval`.
struct Model {
    CoefMatrix B;
    SymMatrix omega;
    std::vector<double> objective_trace;
    int outer_iters = 0;
    bool converged = false;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::string constraint_id = "none";
    bool centered = false;
    Vector x_means;  // empty unless centered
    Vector y_means;

    Matrix predict(const Matrix& x) const;
};

void write_model_json(const std::string& path, const Model& model);
Model read_model_json(const std::string& path);

}  // namespace ccmrce
