#pragma once

// CSV for matrices, JSON for parameters.

#include <charconv>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nmshrink/error.hpp"
#include "nmshrink/kernel.hpp"
#include "nmshrink/model.hpp"

namespace nmshrink::io {

using json = nlohmann::json;

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace detail

/// Reads an m x N count matrix: one row per category, one column per
/// population. Blank lines are skipped. Errors name the 1-based line.
inline CountMatrix read_counts_csv(std::istream& in, bool header = false) {
    std::vector<std::vector<Count>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto cells = detail::split_csv(line);
        if (width == 0) width = cells.size();
        if (cells.size() != width)
            throw InputError("counts CSV line " + std::to_string(lineno) + ": expected " + std::to_string(width) +
                             " fields, found " + std::to_string(cells.size()));
        std::vector<Count> row;
        for (const auto& c : cells) {
            Count v = 0;
            const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc() || ptr != c.data() + c.size() || c.empty())
                throw InputError("counts CSV line " + std::to_string(lineno) + ": '" + c + "' is not an integer");
            if (v < 0) throw InputError("counts CSV line " + std::to_string(lineno) + ": negative count");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("counts CSV: no data rows");
    return CountMatrix::from_rows(rows);
}

inline void write_counts_csv(std::ostream& out, const CountMatrix& X) {
    for (std::size_t i = 0; i < X.m(); ++i) {
        for (std::size_t nu = 0; nu < X.n_cols(); ++nu) out << (nu ? "," : "") << X(i, nu);
        out << '\n';
    }
}

/// Writes a matrix with 17 significant digits, one row per category.
inline void write_matrix_csv(std::ostream& out, const Matrix& d) {
    const auto old = out.precision(17);
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t nu = 0; nu < d.cols(); ++nu) out << (nu ? "," : "") << d(i, nu);
        out << '\n';
    }
    out.precision(old);
}

inline Matrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& c : detail::split_csv(line)) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(c, &used));
                if (used != c.size()) throw std::invalid_argument(c);
            } catch (const std::exception&) {
                throw InputError("matrix CSV line " + std::to_string(lineno) + ": '" + c + "' is not a number");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw InputError("matrix CSV line " + std::to_string(lineno) + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("matrix CSV: no data rows");
    Matrix d(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t nu = 0; nu < rows[i].size(); ++nu) d(i, nu) = rows[i][nu];
    return d;
}

namespace detail {

template <class T>
T get(const json& j, const char* key, const std::string& what) {
    if (!j.contains(key)) throw InputError(what + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(what + ": field '" + key + "': " + e.what());
    }
}

}  // namespace detail

/// {"r": 8, "columns": [[p_1, ..., p_m], ...]}
inline json to_json(const ModelParams& p) {
    json cols = json::array();
    for (const auto& c : p.columns()) cols.push_back(std::vector<double>(c.p().begin(), c.p().end()));
    return {{"r", p.r()}, {"columns", cols}};
}

inline ModelParams model_params_from_json(const json& j) {
    const double r = detail::get<double>(j, "r", "ModelParams");
    const auto cols = detail::get<std::vector<std::vector<double>>>(j, "columns", "ModelParams");
    std::vector<ProbColumn> pc;
    for (const auto& c : cols) pc.emplace_back(c);
    return ModelParams(r, std::move(pc));
}

/// "g1" or {"komaki": {"c": c, "kappa": kappa}}.
inline json to_json(const GChoice& g) {
    if (g.is_constant_one()) return "g1";
    return {{"komaki", {{"c", g.c()}, {"kappa", g.kappa()}}}};
}

inline GChoice g_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "g1" || s == "constant_one") return GChoice::constant_one();
        throw InputError("g: unknown weight '" + s + "'");
    }
    if (j.is_object() && j.contains("komaki")) {
        const auto& k = j.at("komaki");
        return GChoice::komaki(detail::get<double>(k, "c", "g.komaki"), detail::get<double>(k, "kappa", "g.komaki"));
    }
    throw InputError("g: expected \"g1\" or {\"komaki\": {\"c\": ..., \"kappa\": ...}}");
}

/// {"alpha", "beta", "g", "a0", "a"}; g defaults to g1.
inline json to_json(const PriorSpec& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"g", to_json(p.g)}, {"a0", p.a0}, {"a", p.a}};
}

inline PriorSpec prior_from_json(const json& j) {
    PriorSpec p;
    p.alpha = detail::get<double>(j, "alpha", "PriorSpec");
    p.beta = j.contains("beta") ? detail::get<double>(j, "beta", "PriorSpec") : 0.0;
    p.g = j.contains("g") ? g_from_json(j.at("g")) : GChoice::constant_one();
    p.a0 = j.contains("a0") ? detail::get<double>(j, "a0", "PriorSpec") : 0.0;
    p.a = detail::get<std::vector<double>>(j, "a", "PriorSpec");
    p.validate();
    return p;
}

inline json matrix_to_json(const Matrix& d) {
    json cols = json::array();
    for (std::size_t nu = 0; nu < d.cols(); ++nu) cols.push_back(std::vector<double>(d.col(nu).begin(), d.col(nu).end()));
    return cols;
}

inline json parse_json(std::istream& in, const std::string& what) {
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(what + ": " + e.what());
    }
}

}  // namespace nmshrink::io
