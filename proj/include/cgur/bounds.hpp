#ifndef CGUR_BOUNDS_HPP
#define CGUR_BOUNDS_HPP

// Lower bounds for coarse-grained uncertainty relations (B_alpha, R,
// L_alpha, g), the M / M^-1 / F / K chain behind the optimal histogram
// functions, and the coarse-grained relation checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "cgur/coarse.hpp"
#include "cgur/errors.hpp"
#include "cgur/numerics.hpp"
#include "cgur/relation.hpp"
#include "cgur/specfun.hpp"
#include "cgur/states.hpp"

namespace cgur::bounds
{

struct BoundSet
{
    double delta = 1.0;   // position bin width
    double delta_p = 1.0; // momentum bin width
    double hbar = 1.0;
    double alpha = 1.0;
    double B_alpha = 0.0;
    double R = 0.0;
    double L_alpha = 0.0;
    double g = 1.0;
    double log_g = 0.0;
    /// 2 L_1 = ln[(pi e hbar / (Delta delta))^2 g].
    double log_rhs_heis = 0.0;
    double r00 = 1.0;
};

namespace detail
{

inline void check_widths(double delta, double delta_p, double hbar)
{
    const bool ok = delta > 0.0 && delta_p > 0.0 && hbar > 0.0 && std::isfinite(delta) &&
                    std::isfinite(delta_p) && std::isfinite(hbar);
    if (!ok)
        throw DomainError("bin widths and hbar must be positive and finite");
}

inline void check_alpha(double alpha)
{
    if (!(alpha >= 0.5 && alpha <= 1.0))
        throw DomainError("alpha must lie in [1/2, 1]");
}

// ln(x) / (1 - x), continuous at x = 1 and vanishing as x -> infinity.
inline double log_ratio(double x)
{
    if (std::isinf(x))
        return 0.0;
    const double y = x - 1.0;
    if (y == 0.0)
        return -1.0;
    return -std::log1p(y) / y;
}

inline double r_from(const specfun::ProlateResult& pr)
{
    if (pr.leakage < 0.5)
        return -std::log1p(-pr.leakage);
    return -std::log(pr.lambda0);
}

} // namespace detail

/// Bialynicki-Birula bound
///   B_alpha = -1/2 (ln a/(1-a) + ln b/(1-b)) - ln(Delta delta / (pi hbar))
/// with b = a / (2a - 1); b is infinite at a = 1/2.
inline double bound_B(double delta, double delta_p, double hbar, double alpha)
{
    detail::check_widths(delta, delta_p, hbar);
    detail::check_alpha(alpha);
    const double beta = alpha == 0.5 ? std::numeric_limits<double>::infinity() : alpha / (2.0 * alpha - 1.0);
    return -0.5 * (detail::log_ratio(alpha) + detail::log_ratio(beta)) -
           std::log(delta * delta_p / (std::numbers::pi * hbar));
}

/// R = -ln lambda0(Delta delta / (4 hbar)), from the leakage 1 - lambda0
/// when lambda0 is close to one.
inline double bound_R(double delta, double delta_p, double hbar)
{
    detail::check_widths(delta, delta_p, hbar);
    const specfun::ProlateResult pr = specfun::prolate_r00(delta * delta_p / (4.0 * hbar));
    return detail::r_from(pr);
}

inline BoundSet bound_L(double delta, double delta_p, double hbar, double alpha)
{
    detail::check_widths(delta, delta_p, hbar);
    detail::check_alpha(alpha);
    const specfun::ProlateResult pr = specfun::prolate_r00(delta * delta_p / (4.0 * hbar));
    BoundSet b;
    b.delta = delta;
    b.delta_p = delta_p;
    b.hbar = hbar;
    b.alpha = alpha;
    b.B_alpha = bound_B(delta, delta_p, hbar, alpha);
    b.R = detail::r_from(pr);
    b.L_alpha = std::max(b.B_alpha, b.R);
    b.r00 = pr.r00_at_1;
    // (pi e hbar / Delta delta)^2 g = exp(2 max(B_1, R)) exactly, so both
    // follow from R - B_1 without the cancellation of the product form.
    const double b1 = alpha == 1.0 ? b.B_alpha : bound_B(delta, delta_p, hbar, 1.0);
    b.log_g = 2.0 * std::max(0.0, b.R - b1);
    b.g = std::exp(b.log_g);
    b.log_rhs_heis = 2.0 * std::max(b1, b.R);
    return b;
}

// ---------------------------------------------------------------------------
// M, M^-1, F, K
// ---------------------------------------------------------------------------

/// ln M(t) with M(t) = exp(-t/4) / (2 sqrt(pi t) erf(sqrt(t)/2)), t > 0.
inline double log_func_M(double t)
{
    if (!(t > 0.0) || !std::isfinite(t))
        throw DomainError("func_M: t must be positive and finite");
    if (t > 2.0)
        return coarse::log_M_large(t);
    // M = 1/(2t) - s(t); the series for s is accurate here and 1/(2t) >= 1/4
    // dominates, so the difference is benign.
    return std::log(0.5 / t - coarse::unit_ghf(t).s);
}

inline double func_M(double t) { return std::exp(log_func_M(t)); }

/// Inverse of the strictly decreasing M on t > 0.
inline double func_M_inv(double u)
{
    if (!(u > 0.0) || !std::isfinite(u))
        throw DomainError("func_M_inv: u must be positive and finite");
    const double log_u = std::log(u);

    double guess = 0.0;
    if (u >= 0.1)
    {
        guess = 1.0 / (2.0 * u + 1.0 / 6.0);
    }
    else
    {
        // ln M ~ -t/4 - ln(2 sqrt(pi t)) for large t.
        guess = std::max(1.0, -4.0 * log_u);
        for (int i = 0; i < 20; ++i)
            guess = std::max(1.0, -4.0 * (log_u + 0.5 * std::log(4.0 * std::numbers::pi * guess)));
    }

    auto f = [&](double x) { return log_func_M(std::exp(x)) - log_u; };
    double lo = std::log(guess) - 0.5;
    double hi = std::log(guess) + 0.5;
    for (int i = 0; f(lo) < 0.0; ++i)
    {
        lo -= std::max(1.0, std::abs(lo));
        if (i > 60)
            throw NonConvergence("func_M_inv: could not bracket from below");
    }
    for (int i = 0; f(hi) > 0.0; ++i)
    {
        hi += std::max(1.0, 0.5 * std::abs(hi));
        if (i > 60)
            throw NonConvergence("func_M_inv: could not bracket from above");
    }
    return std::exp(numerics::find_root_bracketed(f, lo, hi, {1e-15, 1e-15, 300}));
}

/// ln F(u, t), F = 2 pi (u + s) exp(1 - 2 t s) / Z1^2 in terms of the unit
/// truncated-Gaussian normaliser Z1(t) and variance s(t).
inline double log_func_F(double u, double t)
{
    if (!(u >= 0.0) || !std::isfinite(u))
        throw DomainError("func_F: u must be non-negative and finite");
    if (!(t > 0.0) || !std::isfinite(t))
        throw DomainError("func_F: t must be positive and finite");
    const coarse::UnitGhf g = coarse::unit_ghf(t);
    return std::log(2.0 * std::numbers::pi) + std::log(u + g.s) + 1.0 - 2.0 * t * g.s - 2.0 * g.log_z1;
}

inline double func_F(double u, double t) { return std::exp(log_func_F(u, t)); }

/// ln K(u) = ln F(u, M^-1(u)); K(0) = 1.
///
/// At the minimiser u = M(t), so F collapses to exp(2ut) / erf^2(sqrt(t)/2).
/// Both terms are positive, which keeps ln K accurate as it tends to 0.
inline double log_func_K(double u)
{
    if (!(u >= 0.0) || !std::isfinite(u))
        throw DomainError("func_K: u must be non-negative and finite");
    if (u == 0.0)
        return 0.0;
    const double t = func_M_inv(u);
    const double half_root = 0.5 * std::sqrt(t);
    const double tail = std::erfc(half_root);
    const double log_erf = tail < 0.5 ? std::log1p(-tail) : std::log(std::erf(half_root));
    return 2.0 * u * t - 2.0 * log_erf;
}

inline double func_K(double u) { return std::exp(log_func_K(u)); }

// ---------------------------------------------------------------------------
// Relation checks
// ---------------------------------------------------------------------------

/// Optional inputs to the coarse-grained checks.
struct CoarseCheckOptions
{
    double offset_x = 0.0;
    double offset_p = 0.0;
    /// GHF shape parameters a for the pre-optimised relation; 0 = rectangle.
    double ghf_a_x = 0.0;
    double ghf_a_p = 0.0;
};

/// The four coarse-grained relations from two binned distributions:
///   RenyiDiscrete  H_alpha[r] + H_beta[s] >= L_alpha
///   HeisPreopt     ln s2[w] + ln s2[w~] >= 2 L1 - 2 ln(2 pi e) + 2 h_D + 2 h_d
///   HeisRect       ln(s2_x + D^2/12) + ln(s2_p + d^2/12) >= ln(hbar^2 g / 4)
///   HeisOptimal    ln K(s2_x/D^2) + ln K(s2_p/d^2) >= 2 L1
/// The last three are compared in the log domain.
inline std::vector<RelationReport> check_coarse_relations(const coarse::BinnedDistribution& r,
                                                          const coarse::BinnedDistribution& s,
                                                          const BoundSet& bs, double ghf_a_x = 0.0,
                                                          double ghf_a_p = 0.0)
{
    detail::check_alpha(bs.alpha);
    const double alpha = bs.alpha;
    const double beta = alpha == 0.5 ? std::numeric_limits<double>::infinity() : alpha / (2.0 * alpha - 1.0);
    std::vector<RelationReport> out;

    out.push_back(make_report(RelationId::RenyiDiscrete,
                              coarse::discrete_renyi(r, alpha) + coarse::discrete_renyi(s, beta), bs.L_alpha));

    const double vx = coarse::discrete_variance(r);
    const double vp = coarse::discrete_variance(s);
    const double D = r.width;
    const double d = s.width;

    const auto gx = ghf_a_x == 0.0 ? coarse::GhfSpec::rectangle(D) : coarse::GhfSpec::truncated_gaussian(ghf_a_x, D);
    const auto gp = ghf_a_p == 0.0 ? coarse::GhfSpec::rectangle(d) : coarse::GhfSpec::truncated_gaussian(ghf_a_p, d);
    const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
    out.push_back(make_report(RelationId::HeisPreopt,
                              std::log(vx + coarse::ghf_variance(gx)) + std::log(vp + coarse::ghf_variance(gp)),
                              bs.log_rhs_heis - 2.0 * std::log(two_pi_e) + 2.0 * coarse::ghf_entropy(gx) +
                                  2.0 * coarse::ghf_entropy(gp)));

    out.push_back(make_report(RelationId::HeisRect, std::log(vx + D * D / 12.0) + std::log(vp + d * d / 12.0),
                              std::log(0.25 * bs.hbar * bs.hbar) + bs.log_g));

    out.push_back(make_report(RelationId::HeisOptimal, log_func_K(vx / (D * D)) + log_func_K(vp / (d * d)),
                              bs.log_rhs_heis));
    return out;
}

/// Bins the state's densities and runs the four coarse-grained checks.
inline std::vector<RelationReport> check_coarse_relations(const states::StateModel& state, double delta,
                                                          double delta_p, double alpha,
                                                          const CoarseCheckOptions& opt = {})
{
    const BoundSet bs = bound_L(delta, delta_p, state.hbar, alpha);
    const auto r = coarse::bin_density(states::position_density(state), delta, opt.offset_x);
    const auto s = coarse::bin_density(states::momentum_density(state), delta_p, opt.offset_p);
    return check_coarse_relations(r, s, bs, opt.ghf_a_x, opt.ghf_a_p);
}

/// Optimal relation for caller-supplied discrete variances, which need not
/// come from any state. Failure means no state can produce these values.
inline RelationReport check_hypothetical(double var_x, double var_p, const BoundSet& bs)
{
    if (!(var_x >= 0.0) || !(var_p >= 0.0))
        throw DomainError("check_hypothetical: variances must be non-negative");
    return make_report(RelationId::HeisOptimal,
                       log_func_K(var_x / (bs.delta * bs.delta)) + log_func_K(var_p / (bs.delta_p * bs.delta_p)),
                       bs.log_rhs_heis, Verdict::infeasible_inputs);
}

// ---------------------------------------------------------------------------
// Feasibility region and crossings
// ---------------------------------------------------------------------------

/// Axis of normalised discrete variances u = sigma^2 / width^2. The linear
/// axis is uniform on [0, u_max]; the log axis is 0 followed by a log grid
/// on [u_min, u_max], which resolves the thin forbidden strip of large
/// Delta delta.
struct RegionAxis
{
    double u_max = 1.0;
    std::size_t n = 101;
    bool log_spaced = false;
    double u_min = 1e-6;

    std::vector<double> values() const
    {
        if (n == 0 || !(u_max > 0.0))
            throw DomainError("region axis: need n >= 1 and u_max > 0");
        if (n == 1)
            return {0.0};
        if (!log_spaced)
            return numerics::make_grid(0.0, u_max, n, false);
        if (!(u_min > 0.0 && u_min < u_max))
            throw DomainError("region axis: log axis needs 0 < u_min < u_max");
        std::vector<double> v{0.0};
        const auto rest = numerics::make_grid(u_min, u_max, n - 1, true);
        v.insert(v.end(), rest.begin(), rest.end());
        return v;
    }
};

struct FeasibilityRegion
{
    std::vector<double> u_x;
    std::vector<double> u_p;
    /// Row-major over (u_x, u_p): forbidden[i * u_p.size() + j].
    std::vector<std::uint8_t> forbidden;
    double log_rhs = 0.0;

    double forbidden_fraction() const
    {
        std::size_t count = 0;
        for (auto f : forbidden)
            count += f;
        return static_cast<double>(count) / static_cast<double>(forbidden.size());
    }
};

/// Marks (u_x, u_p) cells with K(u_x) K(u_p) < exp(2 L1).
inline FeasibilityRegion feasibility_region(double delta, double delta_p, double hbar, const RegionAxis& axis)
{
    const BoundSet bs = bound_L(delta, delta_p, hbar, 1.0);
    FeasibilityRegion region;
    region.u_x = axis.values();
    region.u_p = region.u_x;
    region.log_rhs = bs.log_rhs_heis;
    std::vector<double> lk(region.u_x.size());
    for (std::size_t i = 0; i < lk.size(); ++i)
        lk[i] = log_func_K(region.u_x[i]);
    region.forbidden.resize(lk.size() * lk.size());
    for (std::size_t i = 0; i < lk.size(); ++i)
        for (std::size_t j = 0; j < lk.size(); ++j)
            region.forbidden[i * lk.size() + j] = lk[i] + lk[j] < bs.log_rhs_heis ? 1 : 0;
    return region;
}

/// Delta delta / hbar where R and B_1 cross.
inline double find_r_b1_crossing(double lo = 1.0, double hi = 20.0)
{
    auto f = [](double x) { return bound_R(x, 1.0, 1.0) - bound_B(x, 1.0, 1.0, 1.0); };
    return numerics::find_root_bracketed(f, lo, hi, {1e-14, 1e-15, 200});
}

/// Delta delta / hbar where g leaves 1, i.e. R00(c,1)^2 = 2/e.
inline double find_g_switch(double lo = 1.0, double hi = 20.0)
{
    auto f = [](double x) {
        const double r = specfun::prolate_r00(x / 4.0).r00_at_1;
        return 2.0 * std::log(r) - std::log(2.0 / std::numbers::e);
    };
    return numerics::find_root_bracketed(f, lo, hi, {1e-14, 1e-15, 200});
}

} // namespace cgur::bounds

#endif // CGUR_BOUNDS_HPP
