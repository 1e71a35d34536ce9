#include "specshape/table.hpp"

#include <cstdio>

#include "specshape/errors.hpp"

namespace specshape {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) {
        throw ValidationError("table " + name + ": row has " + std::to_string(row.size()) +
                              " cells, expected " + std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(columns);
    for (const auto& r : rows) line(r);
    return out;
}

}  // namespace specshape
