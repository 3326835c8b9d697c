// common.hpp — shared error types, numeric formatting and small file helpers.
#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rudetect {

// Bad or inconsistent input: missing files, malformed rows, contract violations.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric failure: non-convergence, non-finite loss and the like.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline constexpr double kPi = 3.14159265358979323846;

// File formats print reals with 9 significant digits.
inline std::string fmt9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_real(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("not a number: '" + s + "' (" + where + ")");
    }
}

inline long long parse_int(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("not an integer: '" + s + "' (" + where + ")");
    }
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

inline std::string dir_of(const std::string& path) {
    const auto p = path.find_last_of("/\\");
    return p == std::string::npos ? std::string(".") : path.substr(0, p);
}

inline std::string base_name(const std::string& path) {
    const auto p = path.find_last_of("/\\");
    return p == std::string::npos ? path : path.substr(p + 1);
}

// Relative references in manifest/model files resolve against the file's directory.
inline std::string join_path(const std::string& dir, const std::string& rel) {
    if (rel.empty() || rel.front() == '/') return rel;
    if (dir.empty() || dir == ".") return rel;
    return dir + "/" + rel;
}

inline bool file_exists(const std::string& path) {
    std::ifstream in(path);
    return static_cast<bool>(in);
}

}  // namespace rudetect
