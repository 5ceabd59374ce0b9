#ifndef CGUR_CLI_COMMANDS_HPP
#define CGUR_CLI_COMMANDS_HPP

// The five subcommands as pure functions from a RunConfig to a table and an
// exit status.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "cgur/bounds.hpp"
#include "cgur/cli/config.hpp"
#include "cgur/cli/descriptor.hpp"
#include "cgur/cli/parallel.hpp"
#include "cgur/cli/table.hpp"
#include "cgur/coarse.hpp"
#include "cgur/numerics.hpp"
#include "cgur/relation.hpp"
#include "cgur/states.hpp"

namespace cgur::cli
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_violated = 1;
inline constexpr int exit_error = 2;

struct CommandResult
{
    Table table;
    int exit_code = exit_ok;
};

/// Bounds against Delta delta / hbar; each row uses Delta = x hbar, delta = 1.
inline CommandResult cmd_bounds(const RunConfig& cfg)
{
    const auto xs = numerics::make_grid(cfg.sweep.min, cfg.sweep.max, cfg.sweep.points, cfg.sweep.log);
    const double hbar = cfg.hbar;
    const auto rows = parallel_map<std::vector<Cell>>(xs.size(), [&](std::size_t i) {
        const double x = xs[i];
        const double d = x * hbar;
        const bounds::BoundSet bs = bounds::bound_L(d, 1.0, hbar, cfg.alpha);
        return std::vector<Cell>{x,
                                 bounds::bound_B(d, 1.0, hbar, 0.5),
                                 bs.B_alpha,
                                 bounds::bound_B(d, 1.0, hbar, 1.0),
                                 bs.R,
                                 bs.L_alpha,
                                 bs.g};
    });
    CommandResult res;
    res.table.columns = {"dd_over_hbar", "B_half", "B_alpha", "B_one", "R", "L_alpha", "g"};
    res.table.rows = rows;
    return res;
}

/// M(t), M^-1(u), K(u) and the reference line 1 + 2 pi e u on one grid
/// (t = u = x). At x = 0 both M(0) and M^-1(0) are infinite.
inline CommandResult cmd_kfun(const RunConfig& cfg)
{
    const auto xs = numerics::make_grid(cfg.sweep.min, cfg.sweep.max, cfg.sweep.points, cfg.sweep.log);
    const double inf = std::numeric_limits<double>::infinity();
    const auto rows = parallel_map<std::vector<Cell>>(xs.size(), [&](std::size_t i) {
        const double x = xs[i];
        const double m = x > 0.0 ? bounds::func_M(x) : inf;
        const double m_inv = x > 0.0 ? bounds::func_M_inv(x) : inf;
        return std::vector<Cell>{x, m, x, m_inv, bounds::func_K(x),
                                 1.0 + 2.0 * std::numbers::pi * std::numbers::e * x};
    });
    CommandResult res;
    res.table.columns = {"t", "M_t", "u", "M_inv_u", "K_u", "linear_ref"};
    res.table.rows = rows;
    return res;
}

namespace detail
{

inline std::vector<Cell> report_row(const RelationReport& r)
{
    return {std::string(to_string(r.relation_id)), r.lhs, r.rhs, r.margin, std::string(to_string(r.verdict))};
}

inline bool all_hold(const std::vector<RelationReport>& reports)
{
    for (const auto& r : reports)
        if (r.verdict != Verdict::holds)
            return false;
    return true;
}

} // namespace detail

/// Continuous and coarse-grained relation reports for one state.
inline CommandResult cmd_check(const RunConfig& cfg)
{
    const states::StateModel state = parse_state(cfg.state, cfg.hbar);
    std::vector<RelationReport> reports = states::check_continuous_relations(state, cfg.alpha);
    const auto coarse_reports = bounds::check_coarse_relations(state, cfg.delta, cfg.delta_p, cfg.alpha,
                                                               {cfg.offset_x, cfg.offset_p, 0.0, 0.0});
    reports.insert(reports.end(), coarse_reports.begin(), coarse_reports.end());

    CommandResult res;
    res.table.columns = {"relation_id", "lhs", "rhs", "margin", "verdict"};
    for (const auto& r : reports)
        res.table.rows.push_back(detail::report_row(r));
    res.exit_code = detail::all_hold(reports) ? exit_ok : exit_violated;
    return res;
}

/// Forbidden cells of the (u_x, u_p) plane for the configured widths.
inline CommandResult cmd_region(const RunConfig& cfg)
{
    const bounds::RegionAxis axis{cfg.grid.u_max, cfg.grid.n, cfg.grid.log, cfg.grid.u_min};
    const auto region = bounds::feasibility_region(cfg.delta, cfg.delta_p, cfg.hbar, axis);
    CommandResult res;
    res.table.columns = {"u_x", "u_p", "forbidden"};
    res.table.metadata = {{"dd_over_hbar", cfg.delta * cfg.delta_p / cfg.hbar},
                          {"log_rhs", region.log_rhs},
                          {"forbidden_fraction", region.forbidden_fraction()}};
    const std::size_t n = region.u_p.size();
    for (std::size_t i = 0; i < region.u_x.size(); ++i)
        for (std::size_t j = 0; j < n; ++j)
            res.table.rows.push_back(
                {region.u_x[i], region.u_p[j], static_cast<double>(region.forbidden[i * n + j])});
    return res;
}

// ---------------------------------------------------------------------------
// Finite-statistics experiment
// ---------------------------------------------------------------------------

/// Large-sample standard errors of plug-in estimators from the exact bin
/// probabilities (delta method).
namespace sampling
{

inline std::vector<double> normalized(const coarse::BinnedDistribution& b)
{
    const double total = b.total();
    std::vector<double> p = b.probs;
    for (double& v : p)
        v /= total;
    return p;
}

inline double variance_se(const coarse::BinnedDistribution& b, double n)
{
    const auto p = normalized(b);
    double mean = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        mean += static_cast<double>(i) * p[i];
    double m2 = 0.0;
    double m4 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        const double d2 = std::pow((static_cast<double>(i) - mean) * b.width, 2);
        m2 += d2 * p[i];
        m4 += d2 * d2 * p[i];
    }
    return std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
}

/// Standard error of the plug-in Renyi entropy; alpha = inf is the
/// min-entropy, whose error comes from the largest bin alone.
inline double renyi_se(const coarse::BinnedDistribution& b, double alpha, double n)
{
    const auto p = normalized(b);
    if (std::isinf(alpha))
    {
        const double pmax = *std::max_element(p.begin(), p.end());
        return std::sqrt(pmax * (1.0 - pmax) / n) / pmax;
    }
    // Influence function g_j = dH/dp_j; the variance is Var_p[g] / n.
    std::vector<double> g(p.size(), 0.0);
    if (alpha == 1.0)
    {
        for (std::size_t i = 0; i < p.size(); ++i)
            g[i] = p[i] > 0.0 ? -std::log(p[i]) : 0.0;
    }
    else
    {
        double s = 0.0;
        for (double v : p)
            if (v > 0.0)
                s += std::pow(v, alpha);
        for (std::size_t i = 0; i < p.size(); ++i)
            g[i] = p[i] > 0.0 ? alpha * std::pow(p[i], alpha - 1.0) / ((1.0 - alpha) * s) : 0.0;
    }
    double eg = 0.0;
    double eg2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        eg += p[i] * g[i];
        eg2 += p[i] * g[i] * g[i];
    }
    return std::sqrt(std::max(0.0, eg2 - eg * eg) / n);
}

struct ChiSquare
{
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Pearson chi-square of observed frequencies against exact probabilities.
/// Bins expecting fewer than 5 counts are pooled into a single cell.
inline ChiSquare chi_square(const coarse::BinnedDistribution& observed, const coarse::BinnedDistribution& exact,
                            double n)
{
    const double total = exact.total();
    ChiSquare out;
    double pooled_expected = n;
    double pooled_observed = n;
    std::size_t cells = 0;
    for (long j = exact.first; j <= exact.last(); ++j)
    {
        const double e = n * exact.prob(j) / total;
        if (e < 5.0)
            continue;
        const double o = std::round(n * observed.prob(j));
        out.statistic += (o - e) * (o - e) / e;
        pooled_expected -= e;
        pooled_observed -= o;
        ++cells;
    }
    if (pooled_expected > 1e-9 * n)
    {
        out.statistic += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
        ++cells;
    }
    out.dof = cells > 1 ? static_cast<double>(cells - 1) : 0.0;
    out.p_value = out.dof > 0.0 ? boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic) : 1.0;
    return out;
}

} // namespace sampling

/// Draws `samples` detector counts per axis and sets the empirical discrete
/// statistics and relation verdicts beside the exact ones.
inline CommandResult cmd_sample(const RunConfig& cfg)
{
    const states::StateModel state = parse_state(cfg.state, cfg.hbar);
    const auto rho = states::position_density(state);
    const auto rho_p = states::momentum_density(state);
    const auto exact_x = coarse::bin_density(rho, cfg.delta, cfg.offset_x);
    const auto exact_p = coarse::bin_density(rho_p, cfg.delta_p, cfg.offset_p);
    // Independent streams per axis from the one user seed.
    const auto emp_x = coarse::sample_counts(rho, cfg.delta, cfg.offset_x, cfg.samples, cfg.seed);
    const auto emp_p =
        coarse::sample_counts(rho_p, cfg.delta_p, cfg.offset_p, cfg.samples, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    const double n = static_cast<double>(cfg.samples);
    const double alpha = cfg.alpha;
    const double beta = alpha == 0.5 ? std::numeric_limits<double>::infinity() : alpha / (2.0 * alpha - 1.0);

    CommandResult res;
    res.table.columns = {"quantity", "empirical", "exact", "std_error", "z", "verdict_empirical", "verdict_exact"};
    auto stat_row = [&](const std::string& name, double emp, double ex, double se) {
        const double z = se > 0.0 ? (emp - ex) / se : (emp == ex ? 0.0 : std::numeric_limits<double>::infinity());
        res.table.rows.push_back({name, emp, ex, se, z, std::string(), std::string()});
    };
    stat_row("var_x", coarse::discrete_variance(emp_x), coarse::discrete_variance(exact_x),
             sampling::variance_se(exact_x, n));
    stat_row("var_p", coarse::discrete_variance(emp_p), coarse::discrete_variance(exact_p),
             sampling::variance_se(exact_p, n));
    stat_row("shannon_x", coarse::discrete_renyi(emp_x, 1.0), coarse::discrete_renyi(exact_x, 1.0),
             sampling::renyi_se(exact_x, 1.0, n));
    stat_row("shannon_p", coarse::discrete_renyi(emp_p, 1.0), coarse::discrete_renyi(exact_p, 1.0),
             sampling::renyi_se(exact_p, 1.0, n));
    stat_row("renyi_alpha_x", coarse::discrete_renyi(emp_x, alpha), coarse::discrete_renyi(exact_x, alpha),
             sampling::renyi_se(exact_x, alpha, n));
    stat_row("renyi_beta_p", coarse::discrete_renyi(emp_p, beta), coarse::discrete_renyi(exact_p, beta),
             sampling::renyi_se(exact_p, beta, n));

    const auto chi_x = sampling::chi_square(emp_x, exact_x, n);
    const auto chi_p = sampling::chi_square(emp_p, exact_p, n);
    res.table.rows.push_back({"chi2_x", chi_x.statistic, chi_x.dof, std::numeric_limits<double>::quiet_NaN(),
                              chi_x.p_value, std::string(), std::string()});
    res.table.rows.push_back({"chi2_p", chi_p.statistic, chi_p.dof, std::numeric_limits<double>::quiet_NaN(),
                              chi_p.p_value, std::string(), std::string()});

    const auto bs = bounds::bound_L(cfg.delta, cfg.delta_p, cfg.hbar, alpha);
    const auto rep_emp = bounds::check_coarse_relations(emp_x, emp_p, bs);
    const auto rep_exact = bounds::check_coarse_relations(exact_x, exact_p, bs);
    for (std::size_t i = 0; i < rep_emp.size(); ++i)
        res.table.rows.push_back({"margin:" + std::string(to_string(rep_emp[i].relation_id)), rep_emp[i].margin,
                                  rep_exact[i].margin, std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN(), std::string(to_string(rep_emp[i].verdict)),
                                  std::string(to_string(rep_exact[i].verdict))});

    res.table.metadata = {{"state", to_descriptor(state)}, {"samples", n}, {"seed", std::to_string(cfg.seed)}};
    // Empirical verdicts can fail through sampling noise alone (n = 1 is a
    // single bin on each axis), so only the exact ones decide the status.
    res.exit_code = detail::all_hold(rep_exact) ? exit_ok : exit_violated;
    return res;
}

inline CommandResult run_command(const RunConfig& cfg)
{
    cfg.validate();
    switch (cfg.command)
    {
    case Command::bounds:
        return cmd_bounds(cfg);
    case Command::kfun:
        return cmd_kfun(cfg);
    case Command::check:
        return cmd_check(cfg);
    case Command::region:
        return cmd_region(cfg);
    case Command::sample:
        return cmd_sample(cfg);
    }
    throw ParseError("unknown command");
}

} // namespace cgur::cli

#endif // CGUR_CLI_COMMANDS_HPP
