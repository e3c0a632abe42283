#pragma once

#include <string>
#include <vector>

namespace sinesteer::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV with a mandatory header row. Throws MalformedFile
/// (with the 1-based row number) on non-numeric cells or ragged rows, and
/// IoError if the file cannot be opened.
Table read_numeric(const std::string& path);

void write_numeric(const std::string& path, const Table& table);

/// Shortest-round-trip double formatting; used for every numeric value the
/// project writes so repeated runs are byte-identical.
std::string format_double(double v);

std::vector<std::string> split(const std::string& line, char sep);

}  // namespace sinesteer::csv
