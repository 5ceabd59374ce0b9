#ifndef CGUR_CLI_DESCRIPTOR_HPP
#define CGUR_CLI_DESCRIPTOR_HPP

// Textual state descriptors:
//
//   descriptor := single | "mix:" term ("+" term)*
//   term       := number "*" single
//   single     := kind [":" field ("," field)*]
//   field      := key "=" number
//   kind       := "gaussian" | "hermite" | "squarewell"
//
// Keys: gaussian x0, p0, sigma; hermite n, sigma; squarewell n, L.
// Omitted keys keep their defaults. No whitespace is allowed.

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cgur/errors.hpp"
#include "cgur/states.hpp"

namespace cgur::cli
{

namespace detail
{

inline double parse_number(std::string_view text, std::string_view field)
{
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ParseError("state descriptor: field '" + std::string(field) + "' has invalid number '" +
                         std::string(text) + "'");
    return value;
}

inline int parse_int(std::string_view text, std::string_view field)
{
    int value = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end)
        throw ParseError("state descriptor: field '" + std::string(field) + "' needs an integer, got '" +
                         std::string(text) + "'");
    return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

inline states::StateModel parse_single(std::string_view text, double hbar)
{
    const std::size_t colon = text.find(':');
    const std::string_view kind = text.substr(0, colon);
    std::vector<std::pair<std::string_view, std::string_view>> fields;
    if (colon != std::string_view::npos)
    {
        for (std::string_view item : split(text.substr(colon + 1), ','))
        {
            const std::size_t eq = item.find('=');
            if (eq == std::string_view::npos || eq == 0)
                throw ParseError("state descriptor: expected key=value, got '" + std::string(item) + "'");
            fields.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        }
    }
    auto unknown = [&](std::string_view key) {
        return ParseError("state descriptor: unknown field '" + std::string(key) + "' for " + std::string(kind));
    };

    states::StateModel s;
    s.hbar = hbar;
    if (kind == "gaussian")
    {
        states::Gaussian g;
        for (const auto& [key, value] : fields)
        {
            if (key == "x0")
                g.x0 = parse_number(value, key);
            else if (key == "p0")
                g.p0 = parse_number(value, key);
            else if (key == "sigma")
                g.sigma = parse_number(value, key);
            else
                throw unknown(key);
        }
        s.kind = g;
    }
    else if (kind == "hermite")
    {
        states::HermiteGauss h;
        for (const auto& [key, value] : fields)
        {
            if (key == "n")
                h.n = parse_int(value, key);
            else if (key == "sigma")
                h.sigma = parse_number(value, key);
            else
                throw unknown(key);
        }
        s.kind = h;
    }
    else if (kind == "squarewell")
    {
        states::SquareWell w;
        for (const auto& [key, value] : fields)
        {
            if (key == "n")
                w.n = parse_int(value, key);
            else if (key == "L")
                w.L = parse_number(value, key);
            else
                throw unknown(key);
        }
        s.kind = w;
    }
    else
    {
        throw ParseError("state descriptor: unknown kind '" + std::string(kind) + "'");
    }
    return s;
}

inline std::string format_number(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace detail

/// Parses a descriptor into a validated state; errors name the offending field.
inline states::StateModel parse_state(std::string_view text, double hbar = 1.0)
{
    if (text.empty())
        throw ParseError("state descriptor: empty");
    states::StateModel s;
    if (text.substr(0, 4) == "mix:")
    {
        states::Mixture mix;
        for (std::string_view term : detail::split(text.substr(4), '+'))
        {
            const std::size_t star = term.find('*');
            if (star == std::string_view::npos)
                throw ParseError("state descriptor: mixture term '" + std::string(term) + "' lacks 'weight*'");
            const double w = detail::parse_number(term.substr(0, star), "weight");
            mix.components.push_back({w, detail::parse_single(term.substr(star + 1), hbar)});
        }
        s.kind = std::move(mix);
        s.hbar = hbar;
    }
    else
    {
        s = detail::parse_single(text, hbar);
    }
    try
    {
        states::validate(s);
    }
    catch (const DomainError& e)
    {
        throw ParseError(std::string("state descriptor: ") + e.what());
    }
    return s;
}

/// Canonical descriptor of a state (all fields spelled out).
inline std::string to_descriptor(const states::StateModel& s)
{
    using detail::format_number;
    return std::visit(
        [](const auto& k) -> std::string {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, states::Gaussian>)
                return "gaussian:x0=" + format_number(k.x0) + ",p0=" + format_number(k.p0) +
                       ",sigma=" + format_number(k.sigma);
            else if constexpr (std::is_same_v<K, states::HermiteGauss>)
                return "hermite:n=" + std::to_string(k.n) + ",sigma=" + format_number(k.sigma);
            else if constexpr (std::is_same_v<K, states::SquareWell>)
                return "squarewell:n=" + std::to_string(k.n) + ",L=" + format_number(k.L);
            else
            {
                std::string out = "mix:";
                for (std::size_t i = 0; i < k.components.size(); ++i)
                {
                    if (i > 0)
                        out += '+';
                    out += format_number(k.components[i].weight) + '*' + to_descriptor(k.components[i].state);
                }
                return out;
            }
        },
        s.kind);
}

} // namespace cgur::cli

#endif // CGUR_CLI_DESCRIPTOR_HPP
