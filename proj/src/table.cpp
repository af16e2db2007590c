#include "cdmaiot/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cdmaiot {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("Table '" + name + "': row has " + std::to_string(row.size()) +
                                    " cells, header has " + std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& label) const {
    const auto it = std::find(columns.begin(), columns.end(), label);
    if (it == columns.end()) throw std::out_of_range("Table '" + name + "': no column '" + label + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string format_cell(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_real(v); }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, cell);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv(std::ostream& out, const Table& table) {
    auto line = [&](const auto& fields, auto render) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << csv_escape(render(fields[i]));
        }
        out << "\r\n";
    };
    line(table.columns, [](const std::string& s) { return s; });
    for (const auto& row : table.rows) line(row, [](const Cell& c) { return format_cell(c); });
}

std::string to_csv(const Table& table) {
    std::ostringstream out;
    write_csv(out, table);
    return out.str();
}

nlohmann::json to_json(const Table& table) {
    auto value = [](const Cell& cell) -> nlohmann::json {
        struct Visitor {
            nlohmann::json operator()(std::monostate) const { return nullptr; }
            nlohmann::json operator()(bool b) const { return b; }
            nlohmann::json operator()(std::int64_t v) const { return v; }
            nlohmann::json operator()(double v) const {
                return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
            }
            nlohmann::json operator()(const std::string& s) const { return s; }
        };
        return std::visit(Visitor{}, cell);
    };
    auto rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = value(row[i]);
        rows.push_back(std::move(obj));
    }
    return rows;
}

}  // namespace cdmaiot
