#pragma once

#include <string>
#include <vector>

namespace specshape {

/// Fixed 17-significant-digit rendering used in every CSV output.
std::string format_double(double v);

/// A named CSV payload: header plus rows of already-formatted cells.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string to_csv() const;
};

inline std::string cell(double v) { return format_double(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(long long v) { return std::to_string(v); }
inline std::string cell(const std::string& v) { return v; }
inline std::string cell(const char* v) { return v; }

}  // namespace specshape
