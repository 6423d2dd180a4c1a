#include "mechint/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mechint/diagram.hpp"  // ParseError

namespace mechint {

std::size_t DataTable::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ParseError(0, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

bool DataTable::has_column(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

void DataTable::add_column(const std::string& name, std::vector<double> values) {
    if (has_column(name)) throw std::invalid_argument("column '" + name + "' already exists");
    if (values.size() != rows.size())
        throw std::invalid_argument("column '" + name + "' has the wrong length");
    columns.push_back(name);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].push_back(values[i]);
}

namespace {

// One CSV record; handles quoted fields with doubled-quote escapes and
// strips a trailing CR.
std::vector<std::string> split_record(const std::string& line, int lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch == '\r' && i + 1 == line.size()) {
            // trailing CR of a CRLF line
        } else {
            cur += ch;
        }
    }
    if (quoted) throw ParseError(lineno, "unterminated quoted field");
    fields.push_back(cur);
    return fields;
}

std::string trimmed(std::string s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    return s;
}

double parse_number(const std::string& field, int lineno, const std::string& column) {
    std::string t = trimmed(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ParseError(lineno, "non-numeric value '" + field + "' in column '" + column + "'");
    return value;
}

}  // namespace

DataTable read_csv(std::istream& in) {
    DataTable t;
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty input, header required");
    ++lineno;
    for (auto& name : split_record(line, lineno)) {
        name = trimmed(name);
        if (name.empty()) throw ParseError(lineno, "empty column name in header");
        if (t.has_column(name)) throw ParseError(lineno, "duplicate column '" + name + "'");
        t.columns.push_back(name);
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_record(line, lineno);
        if (fields.size() != t.columns.size())
            throw ParseError(lineno, "expected " + std::to_string(t.columns.size()) +
                                         " fields, got " + std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
            row[i] = parse_number(fields[i], lineno, t.columns[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

DataTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    return read_csv(in);
}

std::string format_csv_value(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.007199254740992e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const DataTable& t, std::ostream& out) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out << ',';
        out << t.columns[i];
    }
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_csv_value(row[i]);
        }
        out << '\n';
    }
}

void write_csv_file(const DataTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(t, out);
}

}  // namespace mechint
