#include "additivity/csv.hpp"

#include "additivity/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace additivity {

namespace {

struct Row {
    std::size_t line;
    std::vector<std::string> fields;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<Row> split_rows(std::istream& in, char delim) {
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        Row row{lineno, {}};
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(delim, start);
            row.fields.emplace_back(trim(std::string_view(line).substr(start, pos - start)));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

DataMatrix read_csv(std::istream& in, const CsvOptions& options) {
    const std::vector<Row> rows = split_rows(in, options.delimiter);
    if (rows.empty()) throw ParseError("input contains no data", 1, 1);

    const std::size_t width = rows.front().fields.size();
    for (const Row& r : rows) {
        if (r.fields.size() != width) {
            throw ParseError("expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(r.fields.size()),
                             r.line, std::min(r.fields.size(), width) + 1);
        }
    }

    bool labels = false;
    if (options.row_labels) {
        labels = *options.row_labels;
    } else {
        for (std::size_t i = 1; i < rows.size() && !labels; ++i) {
            labels = !parse_number(rows[i].fields[0]).has_value();
        }
    }
    const std::size_t first_col = labels ? 1 : 0;

    bool header = false;
    if (options.header) {
        header = *options.header;
    } else {
        for (std::size_t j = first_col; j < width && !header; ++j) {
            header = !parse_number(rows.front().fields[j]).has_value();
        }
    }
    const std::size_t first_row = header ? 1 : 0;

    const auto n_rows = static_cast<Eigen::Index>(rows.size() - first_row);
    const auto n_cols = static_cast<Eigen::Index>(width - first_col);
    if (n_rows < 2 || n_cols < 2) {
        throw DimensionError("two-way layout needs at least 2 rows and 2 columns, got " +
                             std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }

    Matrix values(n_rows, n_cols);
    std::vector<std::string> row_names;
    std::vector<std::string> col_names;
    if (header) {
        col_names.assign(rows.front().fields.begin() + static_cast<std::ptrdiff_t>(first_col),
                         rows.front().fields.end());
    }
    for (Eigen::Index i = 0; i < n_rows; ++i) {
        const Row& r = rows[static_cast<std::size_t>(i) + first_row];
        if (labels) row_names.push_back(r.fields[0]);
        for (Eigen::Index j = 0; j < n_cols; ++j) {
            const std::size_t col = static_cast<std::size_t>(j) + first_col;
            const std::string& field = r.fields[col];
            if (field.empty()) throw ParseError("empty cell", r.line, col + 1);
            const auto v = parse_number(field);
            if (!v) throw ParseError("non-numeric cell '" + field + "'", r.line, col + 1);
            if (!std::isfinite(*v)) throw ParseError("non-finite cell '" + field + "'", r.line, col + 1);
            values(i, j) = *v;
        }
    }
    return DataMatrix(std::move(values), std::move(row_names), std::move(col_names));
}

DataMatrix read_csv_file(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_csv(in, options);
}

void write_csv(std::ostream& out, const DataMatrix& data, char delimiter) {
    const bool labels = !data.row_labels().empty();
    const auto& cols = data.col_labels();
    std::ostringstream buf;
    buf << std::setprecision(std::numeric_limits<double>::max_digits10);
    if (!cols.empty()) {
        if (labels) buf << delimiter;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (j) buf << delimiter;
            buf << cols[j];
        }
        buf << '\n';
    }
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        if (labels) buf << data.row_labels()[static_cast<std::size_t>(i)] << delimiter;
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            if (j) buf << delimiter;
            buf << data(i, j);
        }
        buf << '\n';
    }
    out << buf.str();
}

}  // namespace additivity
