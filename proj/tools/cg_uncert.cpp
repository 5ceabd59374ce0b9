// cg_uncert: coarse-grained uncertainty relations from the command line.
//
//   cg_uncert bounds --sweep-min 0.01 --sweep-max 100 --sweep-points 200
//   cg_uncert check --state squarewell:n=1,L=1 --delta 1 --offset-x 0.5 --delta-p 50
//
// Exit status: 0 all relations hold, 1 some relation violated, 2 bad input
// or numerical failure.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cgur/cli/commands.hpp"

namespace
{

struct Flags
{
    std::string config;
    std::optional<std::string> state;
    std::optional<double> delta, delta_p, hbar, alpha, offset_x, offset_p;
    std::optional<double> sweep_min, sweep_max;
    std::optional<std::size_t> sweep_points;
    std::optional<bool> sweep_log;
    std::optional<double> grid_umax, grid_umin;
    std::optional<std::size_t> grid_n;
    std::optional<bool> grid_log;
    std::optional<std::uint64_t> samples, seed;
    std::optional<std::string> out, format;
};

template <typename T>
void take(std::optional<T>& flag, T& field)
{
    if (flag)
        field = *flag;
}

void add_flags(CLI::App& sub, Flags& f)
{
    sub.add_option("--config", f.config, "JSON config file; flags override its values");
    sub.add_option("--state", f.state, "state descriptor, e.g. gaussian:sigma=1");
    sub.add_option("--delta", f.delta, "position bin width");
    sub.add_option("--delta-p", f.delta_p, "momentum bin width");
    sub.add_option("--hbar", f.hbar, "reduced Planck constant (default 1)");
    sub.add_option("--alpha", f.alpha, "Renyi order in [0.5, 1]");
    sub.add_option("--offset-x", f.offset_x, "position grid origin");
    sub.add_option("--offset-p", f.offset_p, "momentum grid origin");
    sub.add_option("--sweep-min", f.sweep_min);
    sub.add_option("--sweep-max", f.sweep_max);
    sub.add_option("--sweep-points", f.sweep_points);
    sub.add_option("--sweep-log", f.sweep_log, "log-spaced sweep (true/false)");
    sub.add_option("--grid-n", f.grid_n, "cells per axis");
    sub.add_option("--grid-umax", f.grid_umax, "largest normalised variance on each axis");
    sub.add_option("--grid-umin", f.grid_umin, "smallest nonzero value of a log axis");
    sub.add_option("--grid-log", f.grid_log, "0 followed by a log-spaced axis (true/false)");
    sub.add_option("--samples", f.samples);
    sub.add_option("--seed", f.seed);
    sub.add_option("--out", f.out, "output file (default stdout)");
    sub.add_option("--format", f.format, "csv or json");
}

cgur::cli::RunConfig build_config(cgur::cli::Command command, Flags& f)
{
    cgur::cli::RunConfig cfg;
    if (!f.config.empty())
        cgur::cli::load_config_file(cfg, f.config);
    cfg.command = command;
    take(f.state, cfg.state);
    take(f.delta, cfg.delta);
    take(f.delta_p, cfg.delta_p);
    take(f.hbar, cfg.hbar);
    take(f.alpha, cfg.alpha);
    take(f.offset_x, cfg.offset_x);
    take(f.offset_p, cfg.offset_p);
    take(f.sweep_min, cfg.sweep.min);
    take(f.sweep_max, cfg.sweep.max);
    take(f.sweep_points, cfg.sweep.points);
    take(f.sweep_log, cfg.sweep.log);
    take(f.grid_umax, cfg.grid.u_max);
    take(f.grid_umin, cfg.grid.u_min);
    take(f.grid_n, cfg.grid.n);
    take(f.grid_log, cfg.grid.log);
    take(f.samples, cfg.samples);
    take(f.seed, cfg.seed);
    take(f.out, cfg.out);
    if (f.format)
        cfg.format = cgur::cli::parse_format(*f.format);
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coarse-grained position/momentum uncertainty relations"};
    app.require_subcommand(1);
    Flags flags;
    const std::pair<const char*, const char*> commands[] = {
        {"bounds", "entropic and Heisenberg lower bounds against Delta delta / hbar"},
        {"kfun", "the M, M^-1 and K functions"},
        {"check", "evaluate every relation for one state"},
        {"region", "forbidden region of normalised discrete variances"},
        {"sample", "finite-statistics detector simulation"}};
    for (const auto& [name, help] : commands)
        add_flags(*app.add_subcommand(name, help), flags);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return cgur::cli::exit_error;
    }

    try
    {
        const std::string name = app.get_subcommands().front()->get_name();
        const auto cfg = build_config(cgur::cli::parse_command(name), flags);
        const auto result = cgur::cli::run_command(cfg);

        std::ofstream file;
        if (!cfg.out.empty())
        {
            file.open(cfg.out);
            if (!file)
                throw cgur::ParseError("cannot open output file '" + cfg.out + "'");
        }
        std::ostream& os = cfg.out.empty() ? std::cout : file;
        if (cfg.format == cgur::cli::Format::json)
            cgur::cli::write_json(os, result.table);
        else
            cgur::cli::write_csv(os, result.table);
        os.flush();
        if (!os)
            throw cgur::ParseError("failed writing output");
        return result.exit_code;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return cgur::cli::exit_error;
    }
}
