#pragma once

// Minimal numeric data table with CSV input/output (RFC-4180-style, header
// required, all cells numeric).

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace mechint {

struct DataTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const;  // throws ParseError
    bool has_column(const std::string& name) const;
    void add_column(const std::string& name, std::vector<double> values);
    std::size_t row_count() const { return rows.size(); }
};

DataTable read_csv(std::istream& in);
DataTable read_csv_file(const std::string& path);
void write_csv(const DataTable& t, std::ostream& out);
void write_csv_file(const DataTable& t, const std::string& path);

/// Integers print without a decimal point, everything else with enough
/// digits to round-trip.
std::string format_csv_value(double v);

}  // namespace mechint
