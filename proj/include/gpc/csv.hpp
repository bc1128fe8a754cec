#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gpc/errors.hpp"

namespace gpc::csv {

/// 17 significant digits, enough to round-trip any double.
inline std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw Error(Errc::InvalidArgument, "CSV has no column '" + name + "'");
    }

    std::vector<double> column(const std::string& name) const {
        const int c = column_index(name);
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& row : rows) {
            if (c >= static_cast<int>(row.size())) throw Error(Errc::InvalidArgument, "short CSV row");
            v.push_back(std::stod(row[c]));
        }
        return v;
    }
};

inline Table parse(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::InvalidArgument, "CSV input is empty");
    t.header = split(line, ',');
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line, ','));
    return t;
}

inline Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open '" + path + "'");
    return parse(in);
}

} // namespace gpc::csv
