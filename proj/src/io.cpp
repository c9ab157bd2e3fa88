#include "ccmrce/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ccmrce/errors.hpp"

namespace ccmrce {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            const std::string cell =
                line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            const char* start = cell.c_str();
            char* end = nullptr;
            const double v = std::strtod(start, &end);
            if (end == start) {
                throw DataError(path + ": unparsable value '" + cell + "'");
            }
            row.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DataError(path + ": ragged rows");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw DataError(path + ": empty matrix");
    }
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return m;
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

SparsityMask read_mask_csv(const std::string& path, bool* diagonal_corrected) {
    return SparsityMask::from_matrix(read_csv_matrix(path), diagonal_corrected);
}

void write_mask_csv(const std::string& path, const SparsityMask& mask) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    for (Index j = 0; j < mask.dim(); ++j) {
        for (Index k = 0; k < mask.dim(); ++k) {
            if (k > 0) out << ',';
            out << (mask.allowed(j, k) ? '1' : '0');
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw DataError("json matrix: expected a nonempty array of arrays");
    }
    const auto rows = static_cast<Index>(j.size());
    const auto cols = static_cast<Index>(j.front().size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (static_cast<Index>(row.size()) != cols) {
            throw DataError("json matrix: ragged rows");
        }
        for (Index k = 0; k < cols; ++k) {
            m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
    }
    return m;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
}

Matrix Model::predict(const Matrix& x) const {
    if (x.cols() != B.rows()) {
        throw DataError("predict: X column count does not match the model");
    }
    if (!centered) return x * B;
    Matrix xc = x.rowwise() - x_means.transpose();
    Matrix y = xc * B;
    return y.rowwise() + y_means.transpose();
}

void write_model_json(const std::string& path, const Model& model) {
    nlohmann::json j;
    j["format"] = 1;
    j["B"] = matrix_to_json(model.B);
    j["Omega"] = matrix_to_json(model.omega.mat());
    j["objective_trace"] = model.objective_trace;
    j["outer_iterations"] = model.outer_iters;
    j["converged"] = model.converged;
    j["lambda1"] = model.lambda1;
    j["lambda2"] = model.lambda2;
    j["constraint"] = model.constraint_id;
    j["centered"] = model.centered;
    j["x_means"] = std::vector<double>(model.x_means.begin(), model.x_means.end());
    j["y_means"] = std::vector<double>(model.y_means.begin(), model.y_means.end());
    write_json_file(path, j);
}

Model read_model_json(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    try {
        if (j.at("format").get<int>() != 1) {
            throw DataError(path + ": unsupported model format");
        }
        Model m;
        m.B = matrix_from_json(j.at("B"));
        m.omega = SymMatrix(matrix_from_json(j.at("Omega")));
        m.objective_trace = j.at("objective_trace").get<std::vector<double>>();
        m.outer_iters = j.at("outer_iterations").get<int>();
        m.converged = j.at("converged").get<bool>();
        m.lambda1 = j.at("lambda1").get<double>();
        m.lambda2 = j.at("lambda2").get<double>();
        m.constraint_id = j.at("constraint").get<std::string>();
        m.centered = j.at("centered").get<bool>();
        const auto xm = j.at("x_means").get<std::vector<double>>();
        const auto ym = j.at("y_means").get<std::vector<double>>();
        m.x_means = Eigen::Map<const Vector>(xm.data(), static_cast<Index>(xm.size()));
        m.y_means = Eigen::Map<const Vector>(ym.data(), static_cast<Index>(ym.size()));
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace ccmrce
