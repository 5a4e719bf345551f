#pragma once

// File ingestion and output. Matrices travel as CSV: n rows of n
// comma-separated reals, optionally preceded by one header row of n unique
// column labels (no row-label column). Estimates leave as a small text
// document, one label,a,b line per vertex plus a trailing report block.
//
// Count matrices (raw nonnegative flows) are mapped into valid edge
// weights with w_ij = (x_ij + 1/2) / (x_max + 1), x_max the largest
// off-diagonal count. The affine offset keeps zeros and the maximum
// strictly inside (0,1) and preserves order, but makes the map sensitive
// to a global rescaling of the counts; callers feeding pre-scaled data
// should feed the raw counts instead.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <unordered_set>
#include <utility>
#include <vector>

#include "betagraph/errors.hpp"
#include "betagraph/estimator.hpp"
#include "betagraph/model.hpp"

namespace betagraph {

enum class MatrixFormat { weights, counts };

// Raw nonnegative flow matrix (e.g. counts of people moving i -> j). The
// diagonal is carried but ignored by every consumer.
struct RawFlowMatrix {
    std::size_t n = 0;
    std::vector<double> x;                // row-major, size n*n
    std::vector<std::string> labels;      // empty, or n unique names

    double operator()(std::size_t i, std::size_t j) const { return x[i * n + j]; }
};

struct LoadedMatrix {
    MatrixFormat format = MatrixFormat::weights;
    std::optional<EdgeWeightMatrix> weights;  // set in weights mode
    std::optional<RawFlowMatrix> counts;      // set in counts mode
    std::vector<std::string> labels;          // empty when the file had no header
    std::vector<std::string> warnings;        // e.g. nonzero diagonal forced to 0
};

namespace detail {

inline std::string trim_field(const std::string& s) {
    std::size_t first = 0, last = s.size();
    while (first < last && std::isspace(static_cast<unsigned char>(s[first]))) ++first;
    while (last > first && std::isspace(static_cast<unsigned char>(s[last - 1]))) --last;
    return s.substr(first, last - first);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim_field(line.substr(start)));
            return fields;
        }
        fields.push_back(trim_field(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

inline bool parse_double(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !field.empty();
}

struct CsvTable {
    std::vector<std::string> labels;         // from the header row, if any
    std::vector<std::vector<double>> rows;
    std::size_t first_data_line = 1;         // 1-based line number of rows[0]
};

// Reads the whole file; the first row becomes the header iff at least one
// of its fields fails to parse as a number. Every data row must have the
// same field count as the first.
inline CsvTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    bool saw_any = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            // Tolerated only at the end of the file.
            std::string rest;
            while (std::getline(in, rest)) {
                if (!rest.empty() && rest.back() == '\r') rest.pop_back();
                if (!rest.empty())
                    throw ParseError("empty line inside '" + path + "'", lineno);
                ++lineno;
            }
            break;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (!saw_any) {
            saw_any = true;
            width = fields.size();
            std::vector<double> values(width);
            bool all_numeric = true;
            for (std::size_t k = 0; k < width; ++k)
                if (!parse_double(fields[k], values[k])) { all_numeric = false; break; }
            if (all_numeric) {
                table.rows.push_back(std::move(values));
                table.first_data_line = lineno;
            } else {
                table.labels = fields;
                table.first_data_line = lineno + 1;
            }
            continue;
        }
        if (fields.size() != width)
            throw ParseError("'" + path + "' line " + std::to_string(lineno) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(width),
                             lineno);
        std::vector<double> values(width);
        for (std::size_t k = 0; k < width; ++k)
            if (!parse_double(fields[k], values[k]))
                throw ParseError("'" + path + "' line " + std::to_string(lineno) + " field " +
                                     std::to_string(k + 1) + ": cannot parse '" + fields[k] +
                                     "' as a number",
                                 lineno, k + 1);
        table.rows.push_back(std::move(values));
    }
    if (!saw_any) throw ParseError("'" + path + "' is empty", 0);
    return table;
}

inline void require_square_table(const CsvTable& table, const std::string& path) {
    const std::size_t n = table.rows.size();
    if (n < 2)
        throw ValidationError("'" + path + "' holds a " + std::to_string(n) +
                              "-row matrix; need n >= 2");
    if (table.rows[0].size() != n)
        throw ValidationError("'" + path + "' holds a " + std::to_string(n) + "x" +
                              std::to_string(table.rows[0].size()) + " matrix; need square");
    if (!table.labels.empty() && table.labels.size() != n)
        throw ValidationError("'" + path + "' header has " + std::to_string(table.labels.size()) +
                              " labels for an n = " + std::to_string(n) + " matrix");
    std::unordered_set<std::string> seen;
    for (const std::string& label : table.labels)
        if (!seen.insert(label).second)
            throw ValidationError("'" + path + "' header repeats label '" + label + "'");
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Writes through a temporary sibling and renames it over the target, so a
// failed run never leaves a truncated file behind.
inline void write_file_atomically(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("failed writing '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

}  // namespace detail

inline LoadedMatrix load_matrix(const std::string& path, MatrixFormat format) {
    const detail::CsvTable table = detail::read_csv_table(path);
    detail::require_square_table(table, path);
    const std::size_t n = table.rows.size();

    LoadedMatrix loaded;
    loaded.format = format;
    loaded.labels = table.labels;

    std::vector<double> values(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) values[i * n + j] = table.rows[i][j];

    if (format == MatrixFormat::counts) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double x = values[i * n + j];
                if (!(x >= 0.0) || !std::isfinite(x))
                    throw ValidationError("count entry (" + std::to_string(i) + "," +
                                              std::to_string(j) + ") = " +
                                              detail::format_double(x) +
                                              " must be finite and >= 0",
                                          static_cast<std::ptrdiff_t>(i),
                                          static_cast<std::ptrdiff_t>(j));
            }
        }
        loaded.counts = RawFlowMatrix{n, std::move(values), table.labels};
        return loaded;
    }

    for (std::size_t i = 0; i < n; ++i) {
        double& diag = values[i * n + i];
        if (diag != 0.0) {
            loaded.warnings.push_back("diagonal entry (" + std::to_string(i) + "," +
                                      std::to_string(i) + ") = " + detail::format_double(diag) +
                                      " forced to 0");
            diag = 0.0;
        }
    }
    loaded.weights = EdgeWeightMatrix::from_entries(n, std::move(values));
    return loaded;
}

// w_ij = (x_ij + 1/2) / (x_max + 1): strictly inside (0,1), order
// preserving, zeros mapped to a small positive weight.
inline EdgeWeightMatrix normalize_counts(const RawFlowMatrix& raw) {
    const std::size_t n = raw.n;
    if (n < 2 || raw.x.size() != n * n)
        throw ValidationError("normalize_counts: malformed flow matrix");
    double x_max = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && raw(i, j) > x_max) x_max = raw(i, j);
    if (x_max <= 0.0)
        throw DegenerateStatisticError(
            "normalize_counts: all off-diagonal counts are zero; no information to fit");
    std::vector<double> w(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) w[i * n + j] = (raw(i, j) + 0.5) / (x_max + 1.0);
    return EdgeWeightMatrix::from_entries(n, std::move(w));
}

// CSV with one %.17g-formatted value per field, so a load of the written
// file reproduces every double bit-for-bit.
inline void save_weight_matrix(const std::string& path, const EdgeWeightMatrix& w,
                               const std::vector<std::string>& labels = {}) {
    const std::size_t n = w.size();
    if (!labels.empty() && labels.size() != n)
        throw ValidationError("save_weight_matrix: " + std::to_string(labels.size()) +
                              " labels for an n = " + std::to_string(n) + " matrix");
    std::ostringstream out;
    if (!labels.empty()) {
        for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << labels[j];
        out << '\n';
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            out << (j ? "," : "") << detail::format_double(w(i, j));
        out << '\n';
    }
    detail::write_file_atomically(path, out.str());
}

// Parameter document: header line, one label,<a>,<b> row per vertex
// (labels default to 1-based indices), and, when a report is supplied, a
// trailing block of estimation scalars. Values carry 17 significant
// digits. With a report the columns are named a_hat,b_hat; without one
// (e.g. generator ground truth) they are named a,b.
inline void write_params_document(const std::string& path, const ParamVector& theta,
                                  const std::vector<std::string>& labels = {},
                                  const EstimationReport* report = nullptr) {
    const std::size_t n = theta.size();
    if (theta.b.size() != n)
        throw ValidationError("write_params_document: malformed parameter vector");
    if (!labels.empty() && labels.size() != n)
        throw ValidationError("write_params_document: " + std::to_string(labels.size()) +
                              " labels for " + std::to_string(n) + " parameter pairs");
    std::ostringstream out;
    out << (report ? "label,a_hat,b_hat\n" : "label,a,b\n");
    for (std::size_t i = 0; i < n; ++i) {
        if (labels.empty())
            out << (i + 1);
        else
            out << labels[i];
        out << ',' << detail::format_double(theta.a[i]) << ','
            << detail::format_double(theta.b[i]) << '\n';
    }
    if (report) {
        out << "# report\n";
        out << "iterations," << report->iterations << '\n';
        out << "final_residual," << detail::format_double(report->final_residual) << '\n';
        out << "jacobian_l1," << detail::format_double(report->jacobian_l1) << '\n';
        out << "M," << detail::format_double(report->M) << '\n';
        out << "epsilon," << detail::format_double(report->epsilon) << '\n';
        out << "converged," << (report->converged ? "true" : "false") << '\n';
    }
    detail::write_file_atomically(path, out.str());
}

}  // namespace betagraph
