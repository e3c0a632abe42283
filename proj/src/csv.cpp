#include "sinesteer/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sinesteer/errors.hpp"

namespace sinesteer::csv {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

static double parse_cell(const std::string& cell, const std::string& path, std::size_t row) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r')) --last;
    double value = 0.0;
    auto [end, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || end != last || first == last)
        raise(ErrorCode::MalformedFile, path + ": non-numeric cell '" + cell + "' at row " + std::to_string(row));
    return value;
}

Table read_numeric(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path);
    Table table;
    std::string line;
    if (!std::getline(in, line)) raise(ErrorCode::MalformedFile, path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split(line, ',');
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != table.header.size())
            raise(ErrorCode::MalformedFile,
                  path + ": expected " + std::to_string(table.header.size()) + " cells, got " +
                      std::to_string(cells.size()) + " at row " + std::to_string(row));
        std::vector<double> values;
        values.reserve(cells.size());
        for (const auto& cell : cells) values.push_back(parse_cell(cell, path, row));
        table.rows.push_back(std::move(values));
    }
    return table;
}

void write_numeric(const std::string& path, const Table& table) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot write " + path);
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace sinesteer::csv
