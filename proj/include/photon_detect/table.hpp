#pragma once

// CSV result tables: `#` provenance lines, one header row, numeric rows
// printed with 17 significant digits, then `#` footer lines.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "photon_detect/errors.hpp"

namespace photon_detect {

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> provenance;
    std::vector<std::string> footer;

    void add_row(std::vector<double> row) {
        if (row.size() != columns.size())
            throw ShapeError("row has " + std::to_string(row.size()) + " values, table has " +
                             std::to_string(columns.size()) + " columns");
        rows.push_back(std::move(row));
    }
};

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_table(const ResultTable& table, std::ostream& out) {
    for (const auto& line : table.provenance) out << "# " << line << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << '\n';
    }
    for (const auto& line : table.footer) out << "# " << line << '\n';
}

/// Writes to `path`, or to standard output when the path is empty or "-".
inline void write_table(const ResultTable& table, const std::string& path) {
    if (path.empty() || path == "-") {
        write_table(table, std::cout);
        std::cout.flush();
        if (!std::cout) throw IOError("failed writing to standard output");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    write_table(table, out);
    out.flush();
    if (!out) throw IOError("failed writing '" + path + "'");
}

/// Parses a table written by write_table. Comment lines before the header are
/// provenance; those after it are footer.
inline ResultTable read_table(std::istream& in) {
    ResultTable t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            std::string body = line.size() > 2 ? line.substr(2) : "";
            (header_seen ? t.footer : t.provenance).push_back(std::move(body));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header_seen) {
            t.columns = std::move(cells);
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (c.empty() || end != c.c_str() + c.size()) throw IOError("malformed number '" + c + "'");
            row.push_back(v);
        }
        t.add_row(std::move(row));
    }
    if (!header_seen) throw IOError("table has no header row");
    return t;
}

inline ResultTable read_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot read '" + path + "'");
    return read_table(in);
}

} // namespace photon_detect
