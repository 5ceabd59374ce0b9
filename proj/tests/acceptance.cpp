// End-to-end acceptance run: one PASS/FAIL line per criterion, with the
// observed figures and wall time. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cgur/bounds.hpp"
#include "cgur/cli/commands.hpp"
#include "cgur/coarse.hpp"
#include "cgur/specfun.hpp"
#include "cgur/states.hpp"

namespace st = cgur::states;
namespace co = cgur::coarse;
namespace bd = cgur::bounds;
namespace num = cgur::numerics;

namespace
{

constexpr double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

st::StateModel gaussian1() { return {st::Gaussian{0.0, 0.0, 1.0}, 1.0}; }

Outcome gaussian_saturation()
{
    const auto s = gaussian1();
    const auto x = st::position_density(s);
    const auto p = st::momentum_density(s);
    const double product = st::variance(x) * st::variance(p);
    const double entropy = st::shannon_entropy_cont(x) + st::shannon_entropy_cont(p);
    const double e1 = std::abs(product - 0.25);
    const double e2 = std::abs(entropy - std::log(std::numbers::pi * std::numbers::e));
    return {e1 <= 1e-9 && e2 <= 1e-8, fmt("|var product - 1/4| = %.2e, |h + h~ - ln(pi e)| = %.2e", e1, e2)};
}

Outcome bound_curves()
{
    const auto xs = num::make_grid(0.01, 100.0, 400, true);
    double worst_small = 0.0;
    double min_gap = INFINITY;
    int crossings = 0;
    double previous = 0.0;
    for (double x : xs)
    {
        const double r = bd::bound_R(x, 1.0, 1.0);
        const double bh = bd::bound_B(x, 1.0, 1.0, 0.5);
        const double b1 = bd::bound_B(x, 1.0, 1.0, 1.0);
        if (x <= 0.1)
            worst_small = std::max(worst_small, std::abs(r - bh));
        min_gap = std::min(min_gap, r - bh);
        const double d = r - b1;
        if (previous != 0.0 && (d > 0.0) != (previous > 0.0))
            ++crossings;
        previous = d;
    }
    const double cross = bd::find_r_b1_crossing();
    const double gswitch = bd::find_g_switch();
    const bool ok = worst_small < 0.01 && min_gap >= 0.0 && crossings == 1 && cross >= 5.5 && cross <= 7.5 &&
                    std::abs(cross - gswitch) <= 1e-9;
    return {ok, fmt("max|R-B_1/2| (x<=0.1) = %.2e, min(R-B_1/2) = %.2e, crossings = %d at %.12f, g switch %.12f",
                    worst_small, min_gap, crossings, cross, gswitch)};
}

Outcome prolate_dual_method()
{
    double worst = 0.0;
    double previous = 0.0;
    bool ordered = true;
    for (double c : {0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0})
    {
        const double a = cgur::specfun::prolate_r00(c).lambda0;
        const double b = cgur::specfun::sinc_eigen_oracle(c);
        worst = std::max(worst, std::abs(a - b) / b);
        ordered = ordered && a > 0.0 && a < 1.0 && a > previous;
        previous = a;
    }
    return {worst <= 1e-6 && ordered, fmt("max relative gap %.2e, in (0,1) and increasing: %s", worst,
                                          ordered ? "yes" : "no")};
}

Outcome k_function()
{
    bool decreasing = true;
    double previous = INFINITY;
    for (double t : num::make_grid(1e-6, 50.0, 1000, true))
    {
        const double m = bd::func_M(t);
        decreasing = decreasing && m < previous;
        previous = m;
    }
    double roundtrip = 0.0;
    bool dominated = true;
    for (double u : num::make_grid(1e-6, 1e6, 100, true))
    {
        roundtrip = std::max(roundtrip, std::abs(bd::func_M(bd::func_M_inv(u)) - u) / u);
        dominated = dominated && bd::func_K(u) <= two_pi_e * (u + 1.0 / 12.0);
    }
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> lu(std::log(1e-6), std::log(1e6));
    std::uniform_real_distribution<double> lt(std::log(1e-6), std::log(500.0));
    int f_below = 0;
    for (int i = 0; i < 1000; ++i)
    {
        const double u = std::exp(lu(rng));
        const double t = std::exp(lt(rng));
        f_below += bd::log_func_F(u, t) < bd::log_func_K(u) - 1e-12;
    }
    const bool k0 = bd::func_K(0.0) == 1.0;
    return {decreasing && roundtrip <= 1e-10 && k0 && dominated && f_below == 0,
            fmt("M decreasing: %s, roundtrip %.2e, K(0)=1: %s, K <= 2 pi e (u+1/12): %s, F<K pairs: %d",
                decreasing ? "yes" : "no", roundtrip, k0 ? "yes" : "no", dominated ? "yes" : "no", f_below)};
}

Outcome hur_recovery()
{
    const auto s = gaussian1();
    const auto x = st::position_density(s);
    const auto p = st::momentum_density(s);
    const double target = two_pi_e * two_pi_e * st::variance(x) * st::variance(p);
    std::vector<double> errs;
    for (double w : {1e-1, 1e-2, 1e-3})
    {
        const double vx = co::discrete_variance(co::bin_density(x, w, 0.0));
        const double vp = co::discrete_variance(co::bin_density(p, w, 0.0));
        const double lhs = w * w * bd::func_K(vx / (w * w)) * w * w * bd::func_K(vp / (w * w));
        errs.push_back(std::abs(lhs - target) / target);
    }
    const bool ok = errs[1] < errs[0] && errs[2] < errs[1] && errs[2] <= 1e-3;
    return {ok, fmt("relative error %.2e, %.2e, %.2e", errs[0], errs[1], errs[2])};
}

Outcome decomposition()
{
    const auto cat = st::catalog();
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst_v = 0.0;
    double worst_h = 0.0;
    for (int draw = 0; draw < 50; ++draw)
    {
        const auto& s = cat[rng() % cat.size()].second;
        const bool momentum = rng() % 2;
        const double eta = std::exp(std::log(0.1) + u01(rng) * std::log(100.0));
        const double offset = eta * u01(rng);
        const double t = u01(rng) * 60.0 - 20.0;
        const co::GhfSpec g = rng() % 4 == 0 ? co::GhfSpec::rectangle(eta)
                                             : co::GhfSpec::truncated_gaussian(t / (eta * eta), eta);
        const auto d = momentum ? st::momentum_density(s) : st::position_density(s);
        const auto b = co::bin_density(d, eta, offset);
        const auto stats = co::decompose_stats(b, g);
        const auto w = co::reconstruct_pdf(b, g).as_density();
        worst_v = std::max(worst_v, std::abs(st::variance(w) - stats.variance_total) /
                                        std::max(1.0, stats.variance_total));
        worst_h = std::max(worst_h, std::abs(st::shannon_entropy_cont(w) - stats.entropy_total));
    }
    return {worst_v <= 1e-8 && worst_h <= 1e-8,
            fmt("worst variance gap %.2e, worst entropy gap %.2e over 50 draws", worst_v, worst_h)};
}

Outcome universal_validity()
{
    const auto cat = st::catalog();
    const auto widths = num::make_grid(std::pow(10.0, -1.5), std::pow(10.0, 1.5), 15, true);
    long checks = 0;
    long violations = 0;
    double worst = INFINITY;
    std::string first_violation;
    for (const auto& [name, s] : cat)
    {
        const auto x = st::position_density(s);
        const auto p = st::momentum_density(s);
        // Binnings indexed by (width index, offset flag), computed once per axis.
        std::map<std::pair<std::size_t, int>, co::BinnedDistribution> bx, bp;
        for (std::size_t i = 0; i < widths.size(); ++i)
            for (int o = 0; o < 2; ++o)
            {
                bx[{i, o}] = co::bin_density(x, widths[i], 0.5 * o * widths[i]);
                bp[{i, o}] = co::bin_density(p, widths[i], 0.5 * o * widths[i]);
            }
        for (std::size_t i = 0; i < widths.size(); ++i)
            for (std::size_t j = 0; j < widths.size(); ++j)
                for (int o = 0; o < 2; ++o)
                    for (double alpha : {0.5, 0.75, 1.0})
                    {
                        const auto bs = bd::bound_L(widths[i], widths[j], s.hbar, alpha);
                        for (const auto& r : bd::check_coarse_relations(bx[{i, o}], bp[{j, o}], bs))
                        {
                            ++checks;
                            worst = std::min(worst, r.margin);
                            if (r.verdict != cgur::Verdict::holds)
                            {
                                if (violations++ == 0)
                                    first_violation = fmt("%s D=%.4g d=%.4g %s margin %.3e", name.c_str(),
                                                          widths[i], widths[j],
                                                          std::string(to_string(r.relation_id)).c_str(), r.margin);
                            }
                        }
                    }
    }
    std::string detail = fmt("%ld relation checks over %zu states x %zu width pairs x 2 offsets x 3 orders, "
                             "%ld violations, smallest margin %.3e",
                             checks, cat.size(), widths.size() * widths.size(), violations, worst);
    if (violations)
        detail += "; first: " + first_violation;
    return {violations == 0, detail};
}

Outcome infeasibility()
{
    const bd::RegionAxis axis{1e3, 101, true, 1e-30};
    std::vector<double> fractions;
    bool origin = true;
    for (double dd : {1.0, 10.0, 100.0})
    {
        const auto reg = bd::feasibility_region(dd, 1.0, 1.0, axis);
        origin = origin && reg.forbidden.front() == 1;
        fractions.push_back(reg.forbidden_fraction());
    }
    const bool ok = origin && fractions[0] > fractions[1] && fractions[1] > fractions[2];
    return {ok, fmt("origin forbidden: %s, forbidden fractions %.4f > %.4f > %.4f", origin ? "yes" : "no",
                    fractions[0], fractions[1], fractions[2])};
}

Outcome square_well()
{
    const st::StateModel well{st::SquareWell{10, 1.0}, 1.0};
    const double delta_p = 100.0 * std::numbers::pi * 10.0;
    const auto r = co::bin_density(st::position_density(well), 1.0, 0.5);
    const auto s = co::bin_density(st::momentum_density(well), delta_p, 0.0);
    const double vx = co::discrete_variance(r);
    const double vp = co::discrete_variance(s);
    const auto reports = bd::check_coarse_relations(r, s, bd::bound_L(1.0, delta_p, 1.0, 1.0));
    bool rect = false;
    bool all = true;
    double rect_margin = 0.0;
    for (const auto& rep : reports)
    {
        all = all && rep.verdict == cgur::Verdict::holds;
        if (rep.relation_id == cgur::RelationId::HeisRect)
        {
            rect = rep.verdict == cgur::Verdict::holds;
            rect_margin = rep.margin;
        }
    }
    return {vx == 0.0 && vp > 0.0 && rect && all,
            fmt("var_x = %.3g, var_p = %.6e, rectangle relation margin %.3e, all four hold: %s", vx, vp,
                rect_margin, all ? "yes" : "no")};
}

Outcome monte_carlo()
{
    const auto d = st::position_density(gaussian1());
    const auto exact = co::bin_density(d, 1.0, 0.0);
    const auto emp = co::sample_counts(d, 1.0, 0.0, 1000000, 20240601);
    double worst_bin = 0.0;
    for (long j = std::min(exact.first, emp.first); j <= std::max(exact.last(), emp.last()); ++j)
    {
        const double p = exact.prob(j);
        const double sd = std::sqrt(std::max(p * (1.0 - p), 1e-300) / 1e6);
        if (p > 0.0)
            worst_bin = std::max(worst_bin, std::abs(emp.prob(j) - p) / sd);
    }

    cgur::cli::RunConfig cfg;
    cfg.command = cgur::cli::Command::sample;
    cfg.samples = 1000000;
    cfg.seed = 20240601;
    const auto res = cgur::cli::run_command(cfg);
    double worst_z = 0.0;
    bool same = true;
    for (const auto& row : res.table.rows)
    {
        const std::string& q = std::get<std::string>(row[0]);
        if (q.rfind("margin:", 0) == 0)
            same = same && std::get<std::string>(row[5]) == std::get<std::string>(row[6]);
        else if (q.rfind("chi2", 0) != 0)
            worst_z = std::max(worst_z, std::abs(std::get<double>(row[4])));
    }
    return {worst_bin <= 5.0 && worst_z <= 5.0 && same,
            fmt("worst bin deviation %.2f sd, worst statistic |z| %.2f, verdicts identical: %s", worst_bin, worst_z,
                same ? "yes" : "no")};
}

} // namespace

int main()
{
    struct Criterion
    {
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"Gaussian saturation", 1.0, gaussian_saturation},
        {"Entropic bound curves", 120.0, bound_curves},
        {"Prolate eigenvalue, two methods", 60.0, prolate_dual_method},
        {"M, K and F functions", 30.0, k_function},
        {"Heisenberg recovery under refinement", 60.0, hur_recovery},
        {"Variance and entropy decompositions", 120.0, decomposition},
        {"Universal validity of coarse relations", 600.0, universal_validity},
        {"Forbidden region", 60.0, infeasibility},
        {"Square-well semiclassical check", 60.0, square_well},
        {"Monte Carlo consistency", 60.0, monte_carlo},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("[%s] criterion %zu: %s | %s | %.2f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", i + 1,
                    c.name, o.detail.c_str(), secs, c.budget_s, in_time ? "" : " over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
