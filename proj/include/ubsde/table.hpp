#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace ubsde {

// Formats a double the same way on every run: shortest "%.15g", with
// non-finite values spelled nan/inf/-inf.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

// Tab-separated table with a header row.
class TableWriter {
public:
    TableWriter(std::ostream& out, std::vector<std::string> columns)
        : out_(out), columns_(std::move(columns)) {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            out_ << (i ? "\t" : "") << columns_[i];
        }
        out_ << '\n';
    }

    const std::vector<std::string>& columns() const { return columns_; }

    template <class... Cells>
    void row(const Cells&... cells) {
        if (sizeof...(cells) != columns_.size()) {
            throw std::logic_error("TableWriter: row width does not match header");
        }
        bool first = true;
        ((emit(cells, first)), ...);
        out_ << '\n';
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size()) {
            throw std::logic_error("TableWriter: row width does not match header");
        }
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "\t" : "") << cells[i];
        out_ << '\n';
    }

private:
    template <class T>
    void emit(const T& cell, bool& first) {
        if (!first) out_ << '\t';
        first = false;
        if constexpr (std::is_same_v<T, bool>) {
            out_ << (cell ? "true" : "false");
        } else if constexpr (std::is_floating_point_v<T>) {
            out_ << format_number(static_cast<double>(cell));
        } else {
            out_ << cell;
        }
    }

    std::ostream& out_;
    std::vector<std::string> columns_;
};

}  // namespace ubsde
