#pragma once

#include "additivity/tabular.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace additivity {

struct CsvOptions {
    char delimiter = ',';
    // std::nullopt = detect from the content (any non-numeric field).
    std::optional<bool> header;
    std::optional<bool> row_labels;
};

/// Parses a rectangular numeric grid. Throws ParseError with 1-based
/// line/column on ragged rows, empty cells and non-numeric data fields.
DataMatrix read_csv(std::istream& in, const CsvOptions& options = {});
DataMatrix read_csv_file(const std::string& path, const CsvOptions& options = {});

/// Writes values with round-trip precision; labels are emitted when present.
void write_csv(std::ostream& out, const DataMatrix& data, char delimiter = ',');

}  // namespace additivity
