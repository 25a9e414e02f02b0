#pragma once

// Line-oriented delimited text reader shared by the loaders.

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "itn/errors.hpp"

namespace itn::detail {

struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

inline std::optional<long long> parse_integer(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

/// Splits every non-blank, non-comment line. A line containing a tab and no
/// comma is split on tabs, otherwise on commas.
inline std::vector<Row> read_rows(std::istream& in) {
    std::vector<Row> rows;
    std::string line;
    std::size_t number = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view = line;
        if (first && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        first = false;
        const auto body = trim(view);
        if (body.empty() || body.front() == '#') continue;
        const char delim = (body.find(',') == std::string_view::npos &&
                            body.find('\t') != std::string_view::npos)
                               ? '\t'
                               : ',';
        Row row;
        row.line = number;
        std::size_t start = 0;
        while (true) {
            const auto pos = body.find(delim, start);
            row.fields.emplace_back(trim(body.substr(start, pos - start)));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace itn::detail
