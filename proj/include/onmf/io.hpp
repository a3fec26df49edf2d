#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "model.hpp"

namespace onmf::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

/// Whole-field decimal number, or nothing. Accepts nan/inf spellings so the
/// caller can reject them with a precise message.
inline std::optional<double> parse_number(std::string_view field) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) return std::nullopt;
    return value;
}

}  // namespace detail

/// Rectangular numeric CSV, rows are samples. A first row containing any
/// non-numeric field is taken as a header. Blank lines are ignored.
inline DataMatrix parse_csv(std::istream& in) {
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t data_rows = 0;
    std::size_t line_no = 0;
    bool first = true;
    std::string line;

    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split(line);

        std::vector<std::optional<double>> parsed;
        parsed.reserve(fields.size());
        bool all_numeric = true;
        for (auto f : fields) {
            parsed.push_back(detail::parse_number(f));
            all_numeric = all_numeric && parsed.back().has_value();
        }
        if (first) {
            first = false;
            cols = fields.size();
            if (!all_numeric) continue;  // header
        }
        if (fields.size() != cols)
            throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                             " fields, found " + std::to_string(fields.size()));
        ++data_rows;
        for (std::size_t n = 0; n < fields.size(); ++n) {
            if (!parsed[n])
                throw InputError("line " + std::to_string(line_no) + ", column " + std::to_string(n + 1) +
                                 ": not a number: '" + std::string(fields[n]) + "'");
            const double x = *parsed[n];
            if (!std::isfinite(x))
                throw InputError("line " + std::to_string(line_no) + ", column " + std::to_string(n + 1) +
                                 ": non-finite value");
            if (x < 0.0) throw NonnegativityError(data_rows, n + 1, x);
            values.push_back(x);
        }
    }
    if (data_rows == 0) throw InputError("no data rows");

    Matrix m(data_rows, cols);
    for (std::size_t r = 0; r < data_rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
    return DataMatrix(std::move(m));
}

inline DataMatrix load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return parse_csv(in);
}

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

inline void write_assignments_csv(std::ostream& out, const FactorizationResult& result) {
    std::vector<bool> unassigned(result.labels.size(), false);
    for (std::size_t m : result.unassigned_rows) unassigned[m] = true;
    out << "row_index,cluster,coefficient,distance,unassigned\n";
    for (std::size_t m = 0; m < result.labels.size(); ++m) {
        const auto& e = result.membership[m];
        out << m << ',';
        if (result.labels[m])
            out << *result.labels[m];
        else
            out << -1;
        out << ',' << format_double(e ? e->coefficient : 0.0) << ',' << format_double(result.distances[m]) << ','
            << (unassigned[m] ? 1 : 0) << '\n';
    }
}

inline void write_trace_csv(std::ostream& out, const std::vector<double>& trace) {
    out << "iteration,objective\n";
    for (std::size_t i = 0; i < trace.size(); ++i) out << (i + 1) << ',' << format_double(trace[i]) << '\n';
}

}  // namespace onmf::io
