#ifndef CGUR_CLI_CONFIG_HPP
#define CGUR_CLI_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cgur/errors.hpp"

namespace cgur::cli
{

enum class Command
{
    bounds,
    kfun,
    check,
    region,
    sample
};

enum class Format
{
    csv,
    json
};

struct SweepConfig
{
    double min = 0.01;
    double max = 100.0;
    std::size_t points = 200;
    bool log = true;
};

struct GridConfig
{
    double u_max = 1.0;
    std::size_t n = 101;
    bool log = false;
    double u_min = 1e-12;
};

struct RunConfig
{
    Command command = Command::bounds;
    std::string state = "gaussian:sigma=1";
    double delta = 1.0;
    double delta_p = 1.0;
    double hbar = 1.0;
    double alpha = 1.0;
    double offset_x = 0.0;
    double offset_p = 0.0;
    SweepConfig sweep;
    GridConfig grid;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    std::string out;
    Format format = Format::csv;

    void validate() const
    {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw ParseError(std::string("config: '") + name + "' must be positive and finite");
        };
        positive(delta, "delta");
        positive(delta_p, "delta_p");
        positive(hbar, "hbar");
        if (!(alpha >= 0.5 && alpha <= 1.0))
            throw ParseError("config: 'alpha' must lie in [0.5, 1]");
        if (!std::isfinite(offset_x) || !std::isfinite(offset_p))
            throw ParseError("config: offsets must be finite");
        if (command == Command::bounds || command == Command::kfun)
        {
            if (sweep.points < 1)
                throw ParseError("config: 'sweep.points' must be at least 1");
            if (!std::isfinite(sweep.min) || !std::isfinite(sweep.max) || sweep.min > sweep.max)
                throw ParseError("config: 'sweep.min' must not exceed 'sweep.max'");
            if (sweep.log && !(sweep.min > 0.0))
                throw ParseError("config: log sweeps need 'sweep.min' > 0");
            if (command == Command::bounds && !(sweep.min > 0.0))
                throw ParseError("config: bounds sweeps need 'sweep.min' > 0");
            if (sweep.min < 0.0)
                throw ParseError("config: 'sweep.min' must be non-negative");
        }
        if (command == Command::region)
        {
            if (grid.n < 1)
                throw ParseError("config: 'grid.n' must be at least 1");
            positive(grid.u_max, "grid.u_max");
            if (grid.log && !(grid.u_min > 0.0 && grid.u_min < grid.u_max))
                throw ParseError("config: log grids need 0 < 'grid.u_min' < 'grid.u_max'");
        }
        if (command == Command::sample && samples < 1)
            throw ParseError("config: 'samples' must be at least 1");
    }
};

inline Command parse_command(std::string_view name)
{
    if (name == "bounds")
        return Command::bounds;
    if (name == "kfun")
        return Command::kfun;
    if (name == "check")
        return Command::check;
    if (name == "region")
        return Command::region;
    if (name == "sample")
        return Command::sample;
    throw ParseError("config: unknown command '" + std::string(name) + "'");
}

inline Format parse_format(std::string_view name)
{
    if (name == "csv")
        return Format::csv;
    if (name == "json")
        return Format::json;
    throw ParseError("config: 'format' must be csv or json, got '" + std::string(name) + "'");
}

namespace detail
{

template <typename T>
T field(const nlohmann::json& j, const std::string& name)
{
    try
    {
        return j.get<T>();
    }
    catch (const nlohmann::json::exception&)
    {
        throw ParseError("config: field '" + name + "' has the wrong type");
    }
}

inline std::uint64_t count_field(const nlohmann::json& j, const std::string& name)
{
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ParseError("config: field '" + name + "' must be a non-negative integer");
    return j.get<std::uint64_t>();
}

} // namespace detail

/// Overlays the fields of a JSON object onto cfg. Keys mirror the flag
/// names with '-' spelled '_'; sweep and grid are nested objects.
inline void apply_json(RunConfig& cfg, const nlohmann::json& doc)
{
    using detail::field;
    if (!doc.is_object())
        throw ParseError("config: top level must be an object");
    for (const auto& [key, value] : doc.items())
    {
        if (key == "command")
            cfg.command = parse_command(field<std::string>(value, key));
        else if (key == "state")
            cfg.state = field<std::string>(value, key);
        else if (key == "delta")
            cfg.delta = field<double>(value, key);
        else if (key == "delta_p")
            cfg.delta_p = field<double>(value, key);
        else if (key == "hbar")
            cfg.hbar = field<double>(value, key);
        else if (key == "alpha")
            cfg.alpha = field<double>(value, key);
        else if (key == "offset_x")
            cfg.offset_x = field<double>(value, key);
        else if (key == "offset_p")
            cfg.offset_p = field<double>(value, key);
        else if (key == "samples")
            cfg.samples = detail::count_field(value, key);
        else if (key == "seed")
            cfg.seed = detail::count_field(value, key);
        else if (key == "out")
            cfg.out = field<std::string>(value, key);
        else if (key == "format")
            cfg.format = parse_format(field<std::string>(value, key));
        else if (key == "sweep")
        {
            if (!value.is_object())
                throw ParseError("config: field 'sweep' must be an object");
            for (const auto& [k, v] : value.items())
            {
                const std::string name = "sweep." + k;
                if (k == "min")
                    cfg.sweep.min = field<double>(v, name);
                else if (k == "max")
                    cfg.sweep.max = field<double>(v, name);
                else if (k == "points")
                    cfg.sweep.points = detail::count_field(v, name);
                else if (k == "log")
                    cfg.sweep.log = field<bool>(v, name);
                else
                    throw ParseError("config: unknown field '" + name + "'");
            }
        }
        else if (key == "grid")
        {
            if (!value.is_object())
                throw ParseError("config: field 'grid' must be an object");
            for (const auto& [k, v] : value.items())
            {
                const std::string name = "grid." + k;
                if (k == "u_max")
                    cfg.grid.u_max = field<double>(v, name);
                else if (k == "u_min")
                    cfg.grid.u_min = field<double>(v, name);
                else if (k == "n")
                    cfg.grid.n = detail::count_field(v, name);
                else if (k == "log")
                    cfg.grid.log = field<bool>(v, name);
                else
                    throw ParseError("config: unknown field '" + name + "'");
            }
        }
        else
        {
            throw ParseError("config: unknown field '" + key + "'");
        }
    }
}

/// Reads a JSON config file; syntax errors carry the parser's line and column.
inline void load_config_file(RunConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("config: cannot open '" + path + "'");
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw ParseError("config: " + path + ": " + e.what());
    }
    apply_json(cfg, doc);
}

} // namespace cgur::cli

#endif // CGUR_CLI_CONFIG_HPP
