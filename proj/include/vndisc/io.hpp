#pragma once

// Matrix (de)serialization and number formatting shared by the CLI and the
// tests.  Matrices travel as JSON objects {"d": n, "re": [[..]], "im": [[..]]}
// with row-major 2-D arrays.  All reals are emitted with 17 significant
// digits so emitted files round-trip bit-exactly through IEEE doubles.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vndisc/core.hpp"
#include "vndisc/errors.hpp"

namespace vndisc {

inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << content;
}

inline CMat parse_matrix_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("matrix JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("d") || !j.contains("re") || !j.contains("im"))
        throw ParseError("matrix JSON: expected object with keys d, re, im");
    if (!j["d"].is_number_integer() || j["d"].get<long long>() < 1)
        throw ParseError("matrix JSON: d must be a positive integer");
    const int d = j["d"].get<int>();

    auto load_part = [&](const char* key) {
        const auto& rows = j[key];
        if (!rows.is_array() || static_cast<int>(rows.size()) != d)
            throw ParseError(std::string("matrix JSON: ") + key + " must be a " +
                             std::to_string(d) + "-row array");
        Eigen::MatrixXd part(d, d);
        for (int i = 0; i < d; ++i) {
            const auto& row = rows[i];
            if (!row.is_array() || static_cast<int>(row.size()) != d)
                throw ParseError(std::string("matrix JSON: ragged or non-square ") + key);
            for (int k = 0; k < d; ++k) {
                if (!row[k].is_number())
                    throw ParseError(std::string("matrix JSON: non-numeric entry in ") + key);
                part(i, k) = row[k].get<double>();
            }
        }
        return part;
    };

    const Eigen::MatrixXd re = load_part("re");
    const Eigen::MatrixXd im = load_part("im");
    CMat m(d, d);
    m.real() = re;
    m.imag() = im;
    if (!is_finite(m)) throw ParseError("matrix JSON: non-finite entries");
    return m;
}

inline CMat read_matrix_file(const std::string& path) {
    return parse_matrix_json(read_file(path));
}

inline std::string write_matrix_json(const CMat& m, int indent = 0) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw NotSquareError("write_matrix_json: matrix must be square and nonempty");
    const int d = static_cast<int>(m.rows());
    const std::string pad(indent, ' ');
    std::string out = "{\n" + pad + "  \"d\": " + std::to_string(d) + ",\n";
    auto emit_part = [&](const char* key, bool real_part) {
        out += pad + "  \"" + key + "\": [";
        for (int i = 0; i < d; ++i) {
            out += (i == 0) ? "[" : pad + "         [";
            for (int k = 0; k < d; ++k) {
                out += fmt17(real_part ? m(i, k).real() : m(i, k).imag());
                if (k + 1 < d) out += ", ";
            }
            out += (i + 1 < d) ? "],\n" : "]";
        }
        out += "]";
    };
    emit_part("re", true);
    out += ",\n";
    emit_part("im", false);
    out += "\n" + pad + "}";
    return out;
}

// One CSV row; the caller supplies already-formatted cells.
inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        out += cells[i];
        if (i + 1 < cells.size()) out += ",";
    }
    out += "\n";
    return out;
}

}  // namespace vndisc
