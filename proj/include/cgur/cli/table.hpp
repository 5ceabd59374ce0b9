#ifndef CGUR_CLI_TABLE_HPP
#define CGUR_CLI_TABLE_HPP

// Column-ordered result tables and their CSV / JSON renderings.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace cgur::cli
{

using Cell = std::variant<double, std::string>;

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, Cell>> metadata;
};

/// 17 significant digits, so every double survives a round trip.
inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0.0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail
{

inline std::string csv_field(const Cell& c)
{
    if (const double* d = std::get_if<double>(&c))
        return format_double(*d);
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string quoted = "\"";
    for (char ch : s)
    {
        if (ch == '"')
            quoted += '"';
        quoted += ch;
    }
    return quoted + '"';
}

// Non-finite numbers have no JSON spelling and become null.
inline nlohmann::ordered_json json_value(const Cell& c)
{
    if (const double* d = std::get_if<double>(&c))
        return std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
    return std::get<std::string>(c);
}

} // namespace detail

/// RFC 4180 CSV with CRLF-free line ends. Metadata precedes the header as
/// "# key=value" comment lines.
inline void write_csv(std::ostream& os, const Table& t)
{
    for (const auto& [key, value] : t.metadata)
        os << "# " << key << '=' << detail::csv_field(value) << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << detail::csv_field(row[i]);
        os << '\n';
    }
}

/// Rows as flat objects keyed by column. Without metadata the document is
/// the bare array; otherwise {"metadata": {...}, "rows": [...]}.
inline void write_json(std::ostream& os, const Table& t)
{
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows)
    {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            obj[t.columns[i]] = detail::json_value(row[i]);
        rows.push_back(std::move(obj));
    }
    if (t.metadata.empty())
    {
        os << rows.dump(2) << '\n';
        return;
    }
    nlohmann::ordered_json doc;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [key, value] : t.metadata)
        meta[key] = detail::json_value(value);
    doc["metadata"] = std::move(meta);
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
}

} // namespace cgur::cli

#endif // CGUR_CLI_TABLE_HPP
