#ifndef CGUR_NUMERICS_HPP
#define CGUR_NUMERICS_HPP

// Deterministic numerical kernels shared by the rest of the library:
// adaptive Gauss-Kronrod quadrature on finite and semi-infinite intervals,
// Brent's bracketed root finder and Gauss-Legendre rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <utility>
#include <vector>

#include "cgur/errors.hpp"

namespace cgur::numerics
{

/// Tail mass budget used when truncating integrals over infinite domains.
inline constexpr double tail_epsilon = 1e-12;

struct QuadSpec
{
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;

    void validate() const
    {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1)
            throw DomainError("QuadSpec: tolerances must be positive and max_subdivisions >= 1");
    }
};

struct RootSpec
{
    double x_tol = 1e-13; // relative to max(1, |x|)
    double f_tol = 1e-13;
    int max_iter = 200;

    void validate() const
    {
        if (!(x_tol > 0.0) || !(f_tol > 0.0) || max_iter < 1)
            throw DomainError("RootSpec: tolerances must be positive and max_iter >= 1");
    }
};

namespace detail
{

// 21-point Kronrod rule with embedded 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> gk21_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> gk21_kronrod_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208745978896, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> gk21_gauss_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel
{
    double a;
    double b;
    double value;
    double error;
    bool roundoff_limited;

    bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel gk21(F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_center = f(center);
    if (!std::isfinite(f_center))
        throw DomainError("integrand is not finite");

    double kronrod = f_center * gk21_kronrod_weights[10];
    double gauss = 0.0;
    double abs_sum = std::abs(kronrod);
    std::array<double, 10> f_left{};
    std::array<double, 10> f_right{};
    for (std::size_t i = 0; i < 10; ++i)
    {
        const double dx = half * gk21_nodes[i];
        const double fl = f(center - dx);
        const double fr = f(center + dx);
        if (!std::isfinite(fl) || !std::isfinite(fr))
            throw DomainError("integrand is not finite");
        f_left[i] = fl;
        f_right[i] = fr;
        kronrod += gk21_kronrod_weights[i] * (fl + fr);
        abs_sum += gk21_kronrod_weights[i] * (std::abs(fl) + std::abs(fr));
        if (i % 2 == 1)
            gauss += gk21_gauss_weights[i / 2] * (fl + fr);
    }

    const double mean = 0.5 * kronrod;
    double asc = gk21_kronrod_weights[10] * std::abs(f_center - mean);
    for (std::size_t i = 0; i < 10; ++i)
        asc += gk21_kronrod_weights[i] * (std::abs(f_left[i] - mean) + std::abs(f_right[i] - mean));

    const double scale = std::abs(half);
    const double result = kronrod * half;
    const double res_abs = abs_sum * scale;
    const double res_asc = asc * scale;
    double err = std::abs((kronrod - gauss) * half);
    if (res_asc != 0.0 && err != 0.0)
        err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    bool limited = false;
    if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps) && 50.0 * eps * res_abs >= err)
    {
        err = 50.0 * eps * res_abs;
        limited = true;
    }
    return {a, b, result, err, limited};
}

} // namespace detail

/// Adaptive 21-point Gauss-Kronrod quadrature of f over [a, b].
///
/// The integrand is assumed piecewise smooth; callers split at known
/// discontinuities. Throws NonConvergence when the subdivision budget runs
/// out before max(abs_tol, rel_tol * |I|) is met.
template <typename F>
double integrate(F&& f, double a, double b, const QuadSpec& spec = {})
{
    spec.validate();
    if (!std::isfinite(a) || !std::isfinite(b))
        throw DomainError("integrate: bounds must be finite");
    if (a == b)
        return 0.0;
    if (a > b)
        return -integrate(f, b, a, spec);

    std::priority_queue<detail::Panel> panels;
    auto first = detail::gk21(f, a, b);
    double total = first.value;
    double total_err = first.error;
    panels.push(first);
    int subdivisions = 1;

    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)))
    {
        if (subdivisions >= spec.max_subdivisions)
        {
            std::ostringstream msg;
            msg << "integrate: subdivision budget exhausted on [" << a << ", " << b
                << "], estimated error " << total_err;
            throw NonConvergence(msg.str());
        }
        const detail::Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        // Nothing left to gain once the worst panel sits at its rounding floor
        // or can no longer be split in floating point.
        if (worst.roundoff_limited || !(mid > worst.a && mid < worst.b))
            break;
        panels.pop();
        const auto left = detail::gk21(f, worst.a, mid);
        const auto right = detail::gk21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++subdivisions;
    }

    // Re-sum to shed drift from the incremental updates.
    double sum = 0.0;
    while (!panels.empty())
    {
        sum += panels.top().value;
        panels.pop();
    }
    return sum;
}

/// Integral of f over [a, +inf) through the map x = a + scale * s / (1 - s).
///
/// f must decay fast enough that the mapped integrand vanishes at s -> 1.
template <typename F>
double integrate_halfline(F&& f, double a, const QuadSpec& spec = {}, double scale = 1.0)
{
    if (!(scale > 0.0))
        throw DomainError("integrate_halfline: scale must be positive");
    auto mapped = [&](double s) {
        const double one_minus = 1.0 - s;
        const double x = a + scale * s / one_minus;
        if (!std::isfinite(x))
            return 0.0;
        const double jac = scale / (one_minus * one_minus);
        const double v = f(x);
        if (v == 0.0)
            return 0.0;
        return v * jac;
    };
    return integrate(mapped, 0.0, 1.0, spec);
}

/// Integral of f over (-inf, b].
template <typename F>
double integrate_lower_halfline(F&& f, double b, const QuadSpec& spec = {}, double scale = 1.0)
{
    auto mirrored = [&](double y) { return f(2.0 * b - y); };
    return integrate_halfline(mirrored, b, spec, scale);
}

/// Brent's method on a sign-changing bracket [lo, hi].
template <typename F>
double find_root_bracketed(F&& f, double lo, double hi, const RootSpec& spec = {})
{
    spec.validate();
    double a = lo;
    double b = hi;
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if (!(std::isfinite(fa) && std::isfinite(fb)) || (fa > 0.0) == (fb > 0.0))
    {
        std::ostringstream msg;
        msg << "find_root_bracketed: f(" << lo << ")=" << fa << " and f(" << hi << ")=" << fb
            << " do not bracket a root";
        throw InvalidBracket(msg.str());
    }

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    for (int iter = 0; iter < spec.max_iter; ++iter)
    {
        if ((fb > 0.0) == (fc > 0.0))
        {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb))
        {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 0.5 * spec.x_tol * std::max(1.0, std::abs(b));
        const double m = 0.5 * (c - b);
        if (std::abs(fb) <= spec.f_tol || std::abs(m) <= tol)
            return std::clamp(b, std::min(lo, hi), std::max(lo, hi));

        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb))
        {
            double p;
            double q;
            const double s = fb / fa;
            if (a == c)
            {
                p = 2.0 * m * s;
                q = 1.0 - s;
            }
            else
            {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            else
                p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q)))
            {
                e = d;
                d = p / q;
            }
            else
            {
                d = m;
                e = d;
            }
        }
        else
        {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if (!std::isfinite(fb))
            throw DomainError("find_root_bracketed: function is not finite inside the bracket");
    }
    throw NonConvergence("find_root_bracketed: iteration budget exhausted");
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n)
{
    if (n == 0)
        throw DomainError("gauss_legendre: n must be positive");
    std::vector<double> nodes(n);
    std::vector<double> weights(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i)
    {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double derivative = 0.0;
        for (int iter = 0; iter < 100; ++iter)
        {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k)
            {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            derivative = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / derivative;
            x -= step;
            if (std::abs(step) < 1e-16)
                break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k)
        {
            const double kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        derivative = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n == 1)
    {
        nodes[0] = 0.0;
        weights[0] = 2.0;
    }
    return {nodes, weights};
}

/// Log-spaced or linearly spaced grid of `points` values from lo to hi inclusive.
inline std::vector<double> make_grid(double lo, double hi, std::size_t points, bool log_spaced)
{
    std::vector<double> grid;
    if (points == 0)
        return grid;
    if (points == 1)
        return {lo};
    grid.reserve(points);
    for (std::size_t i = 0; i < points; ++i)
    {
        const double s = static_cast<double>(i) / static_cast<double>(points - 1);
        if (log_spaced)
            grid.push_back(lo * std::pow(hi / lo, s));
        else
            grid.push_back(lo + s * (hi - lo));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

} // namespace cgur::numerics

#endif // CGUR_NUMERICS_HPP
