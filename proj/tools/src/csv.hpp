// csv.hpp — Minimal CSV writer: comma separated, '.' decimal, header row, LF endings

#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include "floquet_if/errors.hpp"

namespace floquet::app {

/// Shortest round-trip representation; NaN and infinities as nan / inf / -inf.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary), columns_(header.size()) {
        if (!out_) throw Error("cannot write " + path.string());
        write_cells(header);
    }

    template <typename... Cells>
    void row(const Cells&... cells) {
        static_assert(sizeof...(Cells) > 0);
        std::vector<std::string> v{cell(cells)...};
        if (v.size() != columns_) throw Error("CSV row has the wrong number of columns");
        write_cells(v);
    }

    void row(const std::vector<double>& values) {
        std::vector<std::string> v;
        for (double x : values) v.push_back(format_number(x));
        if (v.size() != columns_) throw Error("CSV row has the wrong number of columns");
        write_cells(v);
    }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <typename T>
    static std::string cell(const T& x) {
        if constexpr (std::is_integral_v<T>) return std::to_string(x);
        else return format_number(static_cast<double>(x));
    }

    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
            if (!quote) {
                out_ << cells[i];
                continue;
            }
            out_ << '"';
            for (char c : cells[i]) out_ << (c == '"' ? "\"\"" : std::string(1, c));
            out_ << '"';
        }
        out_ << '\n';
    }

    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace floquet::app
