#ifndef CGUR_STATES_HPP
#define CGUR_STATES_HPP

// Catalog of quantum states with closed-form position and momentum
// densities, the continuous variance and Renyi/Shannon entropy functionals,
// and the infinite-precision uncertainty relation checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cgur/errors.hpp"
#include "cgur/numerics.hpp"
#include "cgur/relation.hpp"

namespace cgur::states
{

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Integration tolerances used for every density functional.
inline constexpr numerics::QuadSpec density_quad{1e-15, 1e-13, 4000};

/// Mass left outside the integration window of a heavy-tailed density.
inline constexpr double heavy_tail_budget = 1e-13;

/// Slowly decaying, oscillating tail. Integrals over such densities are
/// taken over a finite window cut into panels of width `panel`, and
/// `mass_beyond(P)` bounds the mass outside [center - P, center + P].
struct HeavyTail
{
    double panel = 1.0;
    /// The density falls off like |z|^-decay_power.
    double decay_power = 4.0;
    std::function<double(double)> mass_beyond;
};

/// A one-dimensional probability density with the metadata the quadrature
/// needs: support, interior breakpoints, a location/scale hint and, for
/// densities whose tails defeat plain quadrature, a tail model and
/// closed-form raw moments.
struct Density1D
{
    std::function<double(double)> eval;
    double lo = -infinity;
    double hi = infinity;
    std::vector<double> discontinuities;
    double center = 0.0;
    double scale = 1.0;
    std::optional<HeavyTail> heavy_tail;
    std::optional<double> mean;
    std::optional<double> second_moment;

    double operator()(double z) const
    {
        if (z < lo || z > hi)
            return 0.0;
        return eval(z);
    }
};

namespace detail
{

// Integral of g over [a, b], split at breakpoints and, when panel > 0, into
// pieces no wider than panel.
template <typename G>
double integrate_pieces(G& g, double a, double b, const std::vector<double>& breakpoints, double panel,
                        const numerics::QuadSpec& spec)
{
    if (!(b > a))
        return 0.0;
    auto first = std::upper_bound(breakpoints.begin(), breakpoints.end(), a);
    double total = 0.0;
    double left = a;
    auto next_break = first;
    while (left < b)
    {
        double right = b;
        if (next_break != breakpoints.end() && *next_break < right)
            right = *next_break;
        if (panel > 0.0 && right - left > panel)
            right = left + panel;
        total += numerics::integrate(g, left, right, spec);
        if (next_break != breakpoints.end() && right >= *next_break)
            ++next_break;
        left = right;
    }
    return total;
}

inline double heavy_window(const Density1D& d)
{
    double half_width = 4.0 * std::max(d.scale, d.heavy_tail->panel);
    while (d.heavy_tail->mass_beyond(half_width) > heavy_tail_budget)
    {
        half_width *= 1.5;
        if (half_width > 1e12 * std::max(d.scale, 1.0))
            throw TailBudgetExceeded("heavy-tailed density: tail bound never drops below the budget");
    }
    return half_width;
}

} // namespace detail

/// Integral of g(z) over [a, b] intersected with the support of d, split at
/// the density's breakpoints (and tail panels when heavy-tailed).
template <typename G>
double integrate_interval(const Density1D& d, G&& g, double a, double b,
                          const numerics::QuadSpec& spec = density_quad)
{
    const double lo = std::max(a, d.lo);
    const double hi = std::min(b, d.hi);
    if (!(hi > lo))
        return 0.0;
    const double panel = d.heavy_tail ? d.heavy_tail->panel : 0.0;
    if (d.heavy_tail || hi - lo <= 4.0 * d.scale)
        return detail::integrate_pieces(g, lo, hi, d.discontinuities, panel, spec);

    // An interval many scales wide can hide the whole density between two
    // Kronrod nodes (a node sits at a zero of a Hermite state, say), so cut it
    // at center +- scale 2^k as well.
    std::vector<double> cuts = d.discontinuities;
    cuts.push_back(d.center);
    for (double step = d.scale; d.center - step > lo || d.center + step < hi; step *= 2.0)
    {
        cuts.push_back(d.center - step);
        cuts.push_back(d.center + step);
    }
    std::sort(cuts.begin(), cuts.end());
    return detail::integrate_pieces(g, lo, hi, cuts, 0.0, spec);
}

/// Integral of g(z) over the whole support of d. Infinite light tails use
/// the half-line map; heavy tails are truncated inside the tail budget.
template <typename G>
double integrate_over(const Density1D& d, G&& g, const numerics::QuadSpec& spec = density_quad)
{
    if (d.heavy_tail)
    {
        const double half_width = detail::heavy_window(d);
        return integrate_interval(d, g, d.center - half_width, d.center + half_width, spec);
    }

    std::vector<double> cuts;
    for (double x : d.discontinuities)
        if (x > d.lo && x < d.hi)
            cuts.push_back(x);
    if (cuts.empty() && !std::isfinite(d.lo) && !std::isfinite(d.hi))
        cuts.push_back(d.center);

    double total = 0.0;
    const double first = cuts.empty() ? d.hi : cuts.front();
    const double last = cuts.empty() ? d.lo : cuts.back();
    if (std::isfinite(d.lo))
        total += numerics::integrate(g, d.lo, first, spec);
    else
        total += numerics::integrate_lower_halfline(g, first, spec, d.scale);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += numerics::integrate(g, cuts[i], cuts[i + 1], spec);
    if (!cuts.empty())
    {
        if (std::isfinite(d.hi))
            total += numerics::integrate(g, last, d.hi, spec);
        else
            total += numerics::integrate_halfline(g, last, spec, d.scale);
    }
    return total;
}

// ---------------------------------------------------------------------------
// State catalog
// ---------------------------------------------------------------------------

/// Gaussian wave packet centred at (x0, p0) with position width sigma.
struct Gaussian
{
    double x0 = 0.0;
    double p0 = 0.0;
    double sigma = 1.0;
};

/// Harmonic oscillator eigenstate n; sigma is the position width of n = 0.
struct HermiteGauss
{
    int n = 0;
    double sigma = 1.0;
};

/// Energy eigenstate n of the infinite well on [0, L].
struct SquareWell
{
    int n = 1;
    double L = 1.0;
};

struct MixtureComponent;

/// Convex mixture of catalog states; weights are positive and sum to one.
struct Mixture
{
    std::vector<MixtureComponent> components;
};

/// A catalog state. Mixture components are evaluated with the outer hbar.
struct StateModel
{
    std::variant<Gaussian, HermiteGauss, SquareWell, Mixture> kind;
    double hbar = 1.0;
};

struct MixtureComponent
{
    double weight = 1.0;
    StateModel state;
};

inline void validate(const StateModel& s)
{
    if (!(s.hbar > 0.0) || !std::isfinite(s.hbar))
        throw DomainError("state: hbar must be positive");
    std::visit(
        [](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Gaussian>)
            {
                if (!(k.sigma > 0.0) || !std::isfinite(k.x0) || !std::isfinite(k.p0))
                    throw DomainError("gaussian: sigma must be positive and centres finite");
            }
            else if constexpr (std::is_same_v<K, HermiteGauss>)
            {
                if (k.n < 0 || !(k.sigma > 0.0))
                    throw DomainError("hermite: n must be >= 0 and sigma positive");
            }
            else if constexpr (std::is_same_v<K, SquareWell>)
            {
                if (k.n < 1 || !(k.L > 0.0))
                    throw DomainError("squarewell: n must be >= 1 and L positive");
            }
            else
            {
                if (k.components.empty())
                    throw DomainError("mixture: needs at least one component");
                double total = 0.0;
                for (const auto& c : k.components)
                {
                    if (!(c.weight > 0.0))
                        throw DomainError("mixture: weights must be positive");
                    total += c.weight;
                    validate(c.state);
                }
                if (std::abs(total - 1.0) > 1e-9)
                    throw DomainError("mixture: weights must sum to 1");
            }
        },
        s.kind);
}

namespace detail
{

inline double normal_pdf(double z, double mu, double sd)
{
    const double t = (z - mu) / sd;
    return std::exp(-0.5 * t * t) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline Density1D normal_density(double mu, double sd)
{
    Density1D d;
    d.eval = [mu, sd](double z) { return normal_pdf(z, mu, sd); };
    d.center = mu;
    d.scale = sd;
    d.mean = mu;
    d.second_moment = mu * mu + sd * sd;
    return d;
}

// Normalised oscillator eigenfunction phi_n(xi) via the stable three-term
// recurrence on normalised functions.
inline double oscillator_eigenfunction(int n, double xi)
{
    double prev = 0.0;
    double cur = std::exp(-0.5 * xi * xi) / std::pow(std::numbers::pi, 0.25);
    for (int k = 0; k < n; ++k)
    {
        const double kk = static_cast<double>(k);
        const double next = std::sqrt(2.0 / (kk + 1.0)) * xi * cur - std::sqrt(kk / (kk + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

inline Density1D hermite_density(int n, double length)
{
    Density1D d;
    d.eval = [n, length](double z) {
        const double phi = oscillator_eigenfunction(n, z / length);
        return phi * phi / length;
    };
    const double variance = length * length * (n + 0.5);
    d.center = 0.0;
    d.scale = std::sqrt(variance);
    d.mean = 0.0;
    d.second_moment = variance;
    return d;
}

inline double sinc(double x)
{
    if (std::abs(x) < 1e-4)
        return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

inline Density1D mix(const std::vector<std::pair<double, Density1D>>& parts)
{
    Density1D d;
    std::vector<std::pair<double, std::function<double(double)>>> terms;
    d.lo = infinity;
    d.hi = -infinity;
    double center = 0.0;
    bool has_moments = true;
    double mean = 0.0;
    double second = 0.0;
    for (const auto& [w, part] : parts)
    {
        terms.emplace_back(w, part.eval);
        d.lo = std::min(d.lo, part.lo);
        d.hi = std::max(d.hi, part.hi);
        center += w * part.center;
        if (part.mean && part.second_moment)
        {
            mean += w * *part.mean;
            second += w * *part.second_moment;
        }
        else
        {
            has_moments = false;
        }
    }
    d.center = center;
    d.scale = 0.0;
    std::vector<double> cuts;
    for (const auto& [w, part] : parts)
    {
        d.scale = std::max({d.scale, part.scale, std::abs(part.center - center)});
        cuts.insert(cuts.end(), part.discontinuities.begin(), part.discontinuities.end());
        // A component's support edge is a kink or jump of the mixture.
        if (std::isfinite(part.lo) && part.lo > d.lo)
            cuts.push_back(part.lo);
        if (std::isfinite(part.hi) && part.hi < d.hi)
            cuts.push_back(part.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    d.discontinuities = std::move(cuts);

    std::vector<std::pair<double, Density1D>> parts_copy = parts;
    d.eval = [terms, parts_copy](double z) {
        double v = 0.0;
        for (std::size_t i = 0; i < terms.size(); ++i)
            v += terms[i].first * parts_copy[i].second(z);
        return v;
    };
    if (has_moments)
    {
        d.mean = mean;
        d.second_moment = second;
    }

    bool heavy = false;
    double panel = infinity;
    for (const auto& [w, part] : parts)
    {
        if (part.heavy_tail)
        {
            heavy = true;
            panel = std::min(panel, part.heavy_tail->panel);
        }
    }
    if (heavy)
    {
        HeavyTail tail;
        tail.panel = panel;
        tail.mass_beyond = [parts_copy, center](double half_width) {
            double bound = 0.0;
            for (const auto& [w, part] : parts_copy)
            {
                const double reach = half_width - std::abs(part.center - center);
                if (part.heavy_tail)
                    bound += w * (reach > 0.0 ? part.heavy_tail->mass_beyond(reach) : 1.0);
                else if (!(reach > 40.0 * part.scale) &&
                         (part.lo < center - half_width || part.hi > center + half_width))
                    bound += w;
            }
            return bound;
        };
        d.heavy_tail = std::move(tail);
    }
    return d;
}

} // namespace detail

/// Position density rho(x) of a state.
inline Density1D position_density(const StateModel& s)
{
    validate(s);
    return std::visit(
        [&](const auto& k) -> Density1D {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Gaussian>)
            {
                return detail::normal_density(k.x0, k.sigma);
            }
            else if constexpr (std::is_same_v<K, HermiteGauss>)
            {
                return detail::hermite_density(k.n, k.sigma * std::numbers::sqrt2);
            }
            else if constexpr (std::is_same_v<K, SquareWell>)
            {
                const double wave = k.n * std::numbers::pi / k.L;
                const double length = k.L;
                Density1D d;
                d.eval = [wave, length](double x) {
                    const double s = std::sin(wave * x);
                    return 2.0 / length * s * s;
                };
                d.lo = 0.0;
                d.hi = length;
                d.center = 0.5 * length;
                d.scale = length;
                d.mean = 0.5 * length;
                d.second_moment =
                    length * length * (1.0 / 3.0 - 1.0 / (2.0 * k.n * k.n * std::numbers::pi * std::numbers::pi));
                return d;
            }
            else
            {
                std::vector<std::pair<double, Density1D>> parts;
                for (const auto& c : k.components)
                {
                    StateModel inner = c.state;
                    inner.hbar = s.hbar;
                    parts.emplace_back(c.weight, position_density(inner));
                }
                return detail::mix(parts);
            }
        },
        s.kind);
}

/// Momentum density of a state, in closed form for every catalog kind.
///
/// For the square well the transform of sqrt(2/L) sin(k x) on [0, L] gives
///   rho(p) = (k^2 L / (pi hbar)) sinc^2((|q| - k) L / 2) / (|q| + k)^2,
/// with q = p / hbar and k = n pi / L. It decays like p^-4 and oscillates
/// with period 2 pi hbar / L, so it carries a heavy-tail model.
inline Density1D momentum_density(const StateModel& s)
{
    validate(s);
    const double hbar = s.hbar;
    return std::visit(
        [&](const auto& k) -> Density1D {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Gaussian>)
            {
                return detail::normal_density(k.p0, hbar / (2.0 * k.sigma));
            }
            else if constexpr (std::is_same_v<K, HermiteGauss>)
            {
                return detail::hermite_density(k.n, hbar / (k.sigma * std::numbers::sqrt2));
            }
            else if constexpr (std::is_same_v<K, SquareWell>)
            {
                const double wave = k.n * std::numbers::pi / k.L;
                const double length = k.L;
                const double prefactor = wave * wave * length / (std::numbers::pi * hbar);
                Density1D d;
                d.eval = [wave, length, prefactor, hbar](double p) {
                    const double q = std::abs(p) / hbar;
                    const double sc = detail::sinc(0.5 * (q - wave) * length);
                    const double denom = q + wave;
                    return prefactor * sc * sc / (denom * denom);
                };
                d.center = 0.0;
                d.scale = hbar * std::max(wave, 1.0 / length);
                d.mean = 0.0;
                d.second_moment = hbar * hbar * wave * wave;
                HeavyTail tail;
                tail.panel = 2.0 * std::numbers::pi * hbar / length;
                const double envelope = 4.0 * wave * wave / (std::numbers::pi * length);
                tail.mass_beyond = [wave, envelope, hbar](double half_width) {
                    const double q = half_width / hbar;
                    if (!(q > 2.0 * wave))
                        return 1.0;
                    const double shrink = 1.0 - wave * wave / (q * q);
                    return 2.0 * envelope / (3.0 * q * q * q * shrink * shrink);
                };
                d.heavy_tail = std::move(tail);
                return d;
            }
            else
            {
                std::vector<std::pair<double, Density1D>> parts;
                for (const auto& c : k.components)
                {
                    StateModel inner = c.state;
                    inner.hbar = s.hbar;
                    parts.emplace_back(c.weight, momentum_density(inner));
                }
                return detail::mix(parts);
            }
        },
        s.kind);
}

/// Total mass of a density by quadrature.
inline double normalization(const Density1D& d)
{
    return integrate_over(d, [&](double z) { return d(z); });
}

/// sigma^2[f] = <z^2> - <z>^2.
///
/// Quadrature (two-pass about the mean) for light tails; heavy-tailed
/// densities, whose p^2 f(p) tail is not integrable in any useful window,
/// use their closed-form moments.
inline double variance(const Density1D& d)
{
    if (d.heavy_tail)
    {
        if (!d.mean || !d.second_moment)
            throw Divergent("variance: heavy-tailed density without closed-form moments");
        return std::max(0.0, *d.second_moment - *d.mean * *d.mean);
    }
    const double mean = integrate_over(d, [&](double z) { return z * d(z); });
    const double centered = integrate_over(d, [&](double z) {
        const double dz = z - mean;
        return dz * dz * d(z);
    });
    return std::max(0.0, centered);
}

/// Continuous Shannon entropy -int f ln f in nats, with 0 ln 0 = 0.
inline double shannon_entropy_cont(const Density1D& d)
{
    return integrate_over(d, [&](double z) {
        const double f = d(z);
        return f > 0.0 ? -f * std::log(f) : 0.0;
    });
}

/// Continuous Renyi entropy (1/(1-lambda)) ln int f^lambda; lambda = 1 is Shannon.
inline double renyi_entropy_cont(const Density1D& d, double lambda)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw DomainError("renyi_entropy_cont: order must be positive and finite");
    if (lambda == 1.0)
        return shannon_entropy_cont(d);
    // f^lambda decays like |z|^(-lambda p): no integral at all for
    // lambda p <= 1, and one whose tail outruns any finite window below 1.
    if (d.heavy_tail && lambda * d.heavy_tail->decay_power <= 1.0)
        throw Divergent("renyi_entropy_cont: power integral diverges on this heavy tail");
    if (d.heavy_tail && lambda < 1.0)
        throw TailBudgetExceeded("renyi_entropy_cont: order below 1 on a heavy tail is not supported");
    const double integral = integrate_over(d, [&](double z) {
        const double f = d(z);
        return f > 0.0 ? std::pow(f, lambda) : 0.0;
    });
    if (!(integral > 0.0) || !std::isfinite(integral))
        throw Divergent("renyi_entropy_cont: power integral is not finite and positive");
    return std::log(integral) / (1.0 - lambda);
}

/// Conjugate order beta = alpha / (2 alpha - 1) for alpha in (1/2, 1].
inline double conjugate_order(double alpha) { return alpha / (2.0 * alpha - 1.0); }

/// Right side of the continuous Renyi relation for the pair (alpha, beta).
inline double renyi_cont_bound(double alpha, double hbar)
{
    if (alpha == 1.0)
        return std::log(std::numbers::pi * std::numbers::e * hbar);
    const double beta = conjugate_order(alpha);
    return -std::log(alpha / (std::numbers::pi * hbar)) / (2.0 * (1.0 - alpha)) -
           std::log(beta / (std::numbers::pi * hbar)) / (2.0 * (1.0 - beta));
}

/// Heisenberg, Renyi and Shannon relations from the exact densities.
///
/// The Renyi check needs beta = alpha/(2 alpha - 1) finite, so it is left
/// out at alpha = 1/2; the other two are always reported.
inline std::vector<RelationReport> check_continuous_relations(const StateModel& s, double alpha)
{
    if (!(alpha >= 0.5 && alpha <= 1.0))
        throw DomainError("check_continuous_relations: alpha must lie in [1/2, 1]");
    const Density1D rho = position_density(s);
    const Density1D rho_p = momentum_density(s);
    const double hbar = s.hbar;

    std::vector<RelationReport> out;
    const double var_x = variance(rho);
    const double var_p = variance(rho_p);
    out.push_back(make_report(RelationId::HUR, std::log(var_x) + std::log(var_p),
                              std::log(0.25 * hbar * hbar)));

    const double h_x = shannon_entropy_cont(rho);
    const double h_p = shannon_entropy_cont(rho_p);
    if (alpha > 0.5)
    {
        const double beta = conjugate_order(alpha);
        const double lhs = (alpha == 1.0) ? h_x + h_p
                                          : renyi_entropy_cont(rho, alpha) + renyi_entropy_cont(rho_p, beta);
        out.push_back(make_report(RelationId::RenyiCont, lhs, renyi_cont_bound(alpha, hbar)));
    }
    out.push_back(make_report(RelationId::ShannonCont, h_x + h_p,
                              std::log(std::numbers::pi * std::numbers::e * hbar)));
    return out;
}

/// Named states exercised by the property suites and the CLI examples.
inline std::vector<std::pair<std::string, StateModel>> catalog(double hbar = 1.0)
{
    auto make = [hbar](auto kind) { return StateModel{kind, hbar}; };
    std::vector<std::pair<std::string, StateModel>> out;
    out.emplace_back("gaussian:sigma=1", make(Gaussian{0.0, 0.0, 1.0}));
    out.emplace_back("gaussian:x0=0.3,p0=-0.7,sigma=0.5", make(Gaussian{0.3, -0.7, 0.5}));
    out.emplace_back("hermite:n=1,sigma=1", make(HermiteGauss{1, 1.0}));
    out.emplace_back("hermite:n=3,sigma=0.7", make(HermiteGauss{3, 0.7}));
    out.emplace_back("squarewell:n=1,L=1", make(SquareWell{1, 1.0}));
    out.emplace_back("squarewell:n=3,L=1", make(SquareWell{3, 1.0}));
    out.emplace_back("mix:0.5*gaussian:sigma=1+0.5*gaussian:sigma=3",
                     make(Mixture{{{0.5, make(Gaussian{0.0, 0.0, 1.0})}, {0.5, make(Gaussian{0.0, 0.0, 3.0})}}}));
    out.emplace_back("mix:0.3*squarewell:n=2,L=1+0.7*gaussian:x0=0.5,sigma=0.4",
                     make(Mixture{{{0.3, make(SquareWell{2, 1.0})}, {0.7, make(Gaussian{0.5, 0.0, 0.4})}}}));
    return out;
}

} // namespace cgur::states

#endif // CGUR_STATES_HPP
