#pragma once

// Matrix text format:
//
//   MPRMAT 1 <t> <n>
//   <t lines of exactly n characters from {0,1}>
//   # optional trailing comment lines
//
// Writers emit the header and rows only, each line terminated by '\n'.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mpr/core.hpp"

namespace mpr {

inline void write_matrix(std::ostream& os, const ScheduleMatrix& m) {
    os << "MPRMAT 1 " << m.t() << ' ' << m.n() << '\n';
    std::string line(m.n(), '0');
    for (std::size_t i = 1; i <= m.t(); ++i) {
        for (std::size_t j = 1; j <= m.n(); ++j) line[j - 1] = m.at(i, j) ? '1' : '0';
        os << line << '\n';
    }
}

inline std::string to_text(const ScheduleMatrix& m) {
    std::ostringstream os;
    write_matrix(os, m);
    return os.str();
}

inline ScheduleMatrix read_matrix(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw invalid_input("matrix: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::istringstream hdr(line);
    std::string magic;
    long long version = -1, t = -1, n = -1;
    std::string extra;
    if (!(hdr >> magic >> version >> t >> n) || magic != "MPRMAT" || (hdr >> extra))
        throw invalid_input("matrix: malformed header '" + line + "'");
    if (version != 1) throw invalid_input("matrix: unsupported version " + std::to_string(version));
    if (t < 0 || n < 1) throw invalid_input("matrix: need t >= 0 and n >= 1");

    const auto rows = static_cast<std::size_t>(t);
    const auto cols = static_cast<std::size_t>(n);
    MatrixBuilder b(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::getline(is, line)) throw invalid_input("matrix: expected " + std::to_string(t) + " rows");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.size() != cols)
            throw invalid_input("matrix: row " + std::to_string(i + 1) + " has " + std::to_string(line.size()) +
                                " symbols, expected " + std::to_string(n));
        for (std::size_t j = 0; j < cols; ++j) {
            if (line[j] == '1')
                b.set0(i, j);
            else if (line[j] != '0')
                throw invalid_input("matrix: non-binary symbol in row " + std::to_string(i + 1));
        }
    }
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        throw invalid_input("matrix: unexpected content after rows: '" + line + "'");
    }
    return std::move(b).build();
}

inline ScheduleMatrix parse_matrix(const std::string& text) {
    std::istringstream is(text);
    return read_matrix(is);
}

inline ScheduleMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open matrix file '" + path + "'");
    return read_matrix(in);
}

inline void save_matrix(const std::string& path, const ScheduleMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("cannot write matrix file '" + path + "'");
    write_matrix(out, m);
}

}  // namespace mpr
