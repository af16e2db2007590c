#pragma once

// Column-ordered result tables with RFC-4180 CSV and JSON emitters.
//
// Reals are printed with std::to_chars (shortest round-trip form), so a table
// renders to the same bytes on every run.

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace cdmaiot {

using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    /// Throws std::invalid_argument if the row width differs from the header.
    void add_row(std::vector<Cell> row);

    /// Index of a column; throws std::out_of_range when absent.
    [[nodiscard]] std::size_t column(const std::string& label) const;
};

[[nodiscard]] std::string format_real(double value);
[[nodiscard]] std::string format_cell(const Cell& cell);

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
[[nodiscard]] std::string csv_escape(const std::string& field);

/// Header line plus one line per row, CRLF-terminated.
void write_csv(std::ostream& out, const Table& table);
[[nodiscard]] std::string to_csv(const Table& table);

/// Array of row objects keyed by column name. NaN and infinities become null.
[[nodiscard]] nlohmann::json to_json(const Table& table);

}  // namespace cdmaiot
