#ifndef CGUR_COARSE_HPP
#define CGUR_COARSE_HPP

// Coarse graining of a density into equal-width bins, discrete statistics,
// generalized histogram functions (GHFs) and the PDFs they reconstruct,
// plus a finite-statistics detector simulator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "cgur/errors.hpp"
#include "cgur/numerics.hpp"
#include "cgur/specfun.hpp"
#include "cgur/states.hpp"

namespace cgur::coarse
{

/// Mass allowed to fall outside the enumerated bins.
inline constexpr double tail_budget = 1e-9;

/// Hard cap on the number of bins a binning may enumerate.
inline constexpr long max_bins = 1'000'000;

/// Per-bin quadrature tolerances.
inline constexpr numerics::QuadSpec bin_quad{1e-16, 1e-12, 4000};

/// Probabilities of consecutive bins of width `width`; bin j is centred at
/// offset + j * width and covers [center - width/2, center + width/2).
struct BinnedDistribution
{
    double width = 1.0;
    double offset = 0.0;
    long first = 0;
    std::vector<double> probs;
    double tail_mass = 0.0;

    long last() const { return first + static_cast<long>(probs.size()) - 1; }
    double center(long j) const { return offset + static_cast<double>(j) * width; }
    double prob(long j) const
    {
        if (j < first || j > last())
            return 0.0;
        return probs[static_cast<std::size_t>(j - first)];
    }
    double total() const
    {
        double s = 0.0;
        for (double p : probs)
            s += p;
        return s;
    }
};

inline long bin_index(double z, double width, double offset)
{
    return static_cast<long>(std::floor((z - offset) / width + 0.5));
}

/// Bin probabilities of d, enumerated outward from the bin holding the
/// density's centre until the captured mass reaches 1 - tail_budget. Light
/// tails keep going until a new ring of bins adds nothing measurable, which
/// costs a handful of bins and keeps the discrete sums clean.
inline BinnedDistribution bin_density(const states::Density1D& d, double width, double offset = 0.0)
{
    if (!(width > 0.0) || !std::isfinite(width) || !std::isfinite(offset))
        throw DomainError("bin_density: width must be positive and offset finite");

    auto bin_mass = [&](long j) {
        const double c = offset + static_cast<double>(j) * width;
        return states::integrate_interval(
            d, [&](double z) { return d(z); }, c - 0.5 * width, c + 0.5 * width, bin_quad);
    };
    auto outside_left = [&](long j) { return offset + (static_cast<double>(j) + 0.5) * width <= d.lo; };
    auto outside_right = [&](long j) { return offset + (static_cast<double>(j) - 0.5) * width >= d.hi; };

    double anchor = d.center;
    if (anchor < d.lo || anchor > d.hi)
        anchor = 0.5 * (d.lo + d.hi);
    const long center = bin_index(anchor, width, offset);

    std::vector<double> left;  // bins center-1, center-2, ...
    std::vector<double> right; // bins center, center+1, ...
    double cumulative = bin_mass(center);
    right.push_back(cumulative);
    bool left_done = false;
    bool right_done = outside_right(center + 1);
    long count = 1;
    for (long step = 1;; ++step)
    {
        double ring = 0.0;
        if (!left_done)
        {
            const long j = center - step;
            if (outside_left(j))
            {
                left_done = true;
            }
            else
            {
                const double m = bin_mass(j);
                left.push_back(m);
                ring += m;
                ++count;
            }
        }
        if (!right_done)
        {
            const long j = center + step;
            if (outside_right(j))
            {
                right_done = true;
            }
            else
            {
                const double m = bin_mass(j);
                right.push_back(m);
                ring += m;
                ++count;
            }
        }
        cumulative += ring;
        if (left_done && right_done)
            break;
        const bool budget_met = cumulative >= 1.0 - tail_budget;
        if (budget_met && (d.heavy_tail || ring < 1e-18))
            break;
        if (count >= max_bins)
            throw TailBudgetExceeded("bin_density: 10^6 bins do not capture 1 - 1e-9 of the mass");
    }

    BinnedDistribution b;
    b.width = width;
    b.offset = offset;
    b.first = center - static_cast<long>(left.size());
    b.probs.assign(left.rbegin(), left.rend());
    b.probs.insert(b.probs.end(), right.begin(), right.end());
    // Trim empty edge bins left over from compact supports.
    while (b.probs.size() > 1 && b.probs.back() == 0.0)
        b.probs.pop_back();
    std::size_t lead = 0;
    while (lead + 1 < b.probs.size() && b.probs[lead] == 0.0)
        ++lead;
    b.probs.erase(b.probs.begin(), b.probs.begin() + static_cast<std::ptrdiff_t>(lead));
    b.first += static_cast<long>(lead);
    b.tail_mass = std::max(0.0, 1.0 - cumulative);
    if (b.tail_mass > tail_budget)
        throw TailBudgetExceeded("bin_density: captured mass falls short of 1 - 1e-9");
    return b;
}

// Discrete statistics use the enumerated probabilities renormalised to one;
// the tail mass sits below the binning budget and is ignored.

/// sigma^2 = sum z_j^2 p_j - (sum z_j p_j)^2 with z_j the bin centres.
inline double discrete_variance(const BinnedDistribution& b)
{
    const double total = b.total();
    if (!(total > 0.0))
        throw DomainError("discrete_variance: empty distribution");
    double mean = 0.0;
    for (std::size_t i = 0; i < b.probs.size(); ++i)
        mean += static_cast<double>(i) * b.probs[i];
    mean /= total;
    double var = 0.0;
    for (std::size_t i = 0; i < b.probs.size(); ++i)
    {
        const double dz = static_cast<double>(i) - mean;
        var += dz * dz * b.probs[i];
    }
    return b.width * b.width * var / total;
}

/// Discrete Renyi entropy in nats; alpha = 1 is Shannon and alpha = inf the
/// min-entropy -ln max p.
inline double discrete_renyi(const BinnedDistribution& b, double alpha)
{
    if (!(alpha > 0.0))
        throw DomainError("discrete_renyi: order must be positive");
    const double total = b.total();
    if (!(total > 0.0))
        throw DomainError("discrete_renyi: empty distribution");
    if (std::isinf(alpha))
    {
        const double pmax = *std::max_element(b.probs.begin(), b.probs.end());
        return -std::log(pmax / total);
    }
    if (alpha == 1.0)
    {
        double h = 0.0;
        for (double p : b.probs)
            if (p > 0.0)
            {
                const double q = p / total;
                h -= q * std::log(q);
            }
        return h;
    }
    // Factor out the largest probability so large orders cannot underflow.
    const double pmax = *std::max_element(b.probs.begin(), b.probs.end()) / total;
    double s = 0.0;
    for (double p : b.probs)
        if (p > 0.0)
            s += std::pow(p / total / pmax, alpha);
    return (alpha * std::log(pmax) + std::log(s)) / (1.0 - alpha);
}

// ---------------------------------------------------------------------------
// Generalized histogram functions
// ---------------------------------------------------------------------------

enum class GhfFamily
{
    Rectangle,
    TruncatedGaussian
};

/// Per-bin density exp(-a z^2) restricted to [-eta/2, eta/2) and normalised;
/// a = 0 is the rectangle. Negative a gives a convex profile.
struct GhfSpec
{
    GhfFamily family = GhfFamily::Rectangle;
    double a = 0.0;
    double eta = 1.0;

    static GhfSpec rectangle(double eta) { return {GhfFamily::Rectangle, 0.0, eta}; }
    static GhfSpec truncated_gaussian(double a, double eta) { return {GhfFamily::TruncatedGaussian, a, eta}; }

    double shape() const { return family == GhfFamily::Rectangle ? 0.0 : a; }

    void validate() const
    {
        if (!(eta > 0.0) || !std::isfinite(eta))
            throw DomainError("GhfSpec: width must be positive");
        if (!std::isfinite(a))
            throw DomainError("GhfSpec: shape parameter must be finite");
    }
};

/// Unit-width truncated Gaussian exp(-t z^2) on [-1/2, 1/2]:
/// log of its normaliser Z1(t) and its variance s(t).
struct UnitGhf
{
    double log_z1 = 0.0;
    double s = 1.0 / 12.0;
};

/// M(t) = 1/(2t) - s(t) for t > 2, in log form so it never underflows.
inline double log_M_large(double t)
{
    const double e = std::erf(0.5 * std::sqrt(t));
    return -0.25 * t - std::log(2.0 * std::sqrt(std::numbers::pi * t)) - std::log(e);
}

inline UnitGhf unit_ghf(double t)
{
    if (!std::isfinite(t))
        throw DomainError("unit_ghf: shape must be finite");
    UnitGhf g;
    if (std::abs(t) <= 2.0)
    {
        // Power series of the two moment integrals; |t|/4 <= 1/2 so this
        // converges quickly without cancellation trouble.
        double z = 0.0;
        double n1 = 0.0;
        double term = 1.0; // (-t)^n / (n! 4^n)
        for (int n = 0; n < 60; ++n)
        {
            z += term / (2.0 * n + 1.0);
            n1 += 0.25 * term / (2.0 * n + 3.0);
            term *= -t / (4.0 * (n + 1.0));
            if (std::abs(term) < 1e-18)
                break;
        }
        g.log_z1 = std::log(z);
        g.s = n1 / z;
    }
    else if (t > 2.0)
    {
        const double r = std::sqrt(t);
        g.log_z1 = 0.5 * std::log(std::numbers::pi / t) + std::log(std::erf(0.5 * r));
        g.s = 0.5 / t - std::exp(log_M_large(t));
    }
    else
    {
        const double b = -t;
        const double y = 0.5 * std::sqrt(b);
        const double dy = specfun::dawson(y);
        g.s = (y / dy - 1.0) / (2.0 * b);
        g.log_z1 = std::log(2.0 * dy / std::sqrt(b)) + y * y;
    }
    return g;
}

/// Variance of the per-bin density.
inline double ghf_variance(const GhfSpec& g)
{
    g.validate();
    if (g.family == GhfFamily::Rectangle)
        return g.eta * g.eta / 12.0;
    return g.eta * g.eta * unit_ghf(g.a * g.eta * g.eta).s;
}

/// Shannon entropy of the per-bin density; ln(eta) for the rectangle.
inline double ghf_entropy(const GhfSpec& g)
{
    g.validate();
    if (g.family == GhfFamily::Rectangle)
        return std::log(g.eta);
    const double t = g.a * g.eta * g.eta;
    const UnitGhf u = unit_ghf(t);
    return std::log(g.eta) + u.log_z1 + t * u.s;
}

/// Per-bin density at displacement z from the bin centre.
inline double ghf_density(const GhfSpec& g, double z)
{
    if (z < -0.5 * g.eta || z >= 0.5 * g.eta)
        return 0.0;
    if (g.family == GhfFamily::Rectangle)
        return 1.0 / g.eta;
    const double t = g.a * g.eta * g.eta;
    const UnitGhf u = unit_ghf(t);
    return std::exp(-g.a * z * z - u.log_z1) / g.eta;
}

/// w(z) = sum_k p_k D(z - z_k) over the bins of `base`.
struct ReconstructedPdf
{
    BinnedDistribution base;
    GhfSpec ghf;

    double operator()(double z) const
    {
        const long j = bin_index(z, base.width, base.offset);
        const double p = base.prob(j);
        if (p == 0.0)
            return 0.0;
        return p / norm_ * kernel(z - base.center(j));
    }

    double edge_lo() const { return base.center(base.first) - 0.5 * base.width; }
    double edge_hi() const { return base.center(base.last()) + 0.5 * base.width; }

    /// View as a Density1D with breakpoints at every bin edge.
    states::Density1D as_density() const
    {
        states::Density1D d;
        ReconstructedPdf self = *this;
        d.eval = [self](double z) { return self(z); };
        d.lo = edge_lo();
        d.hi = edge_hi();
        for (long j = base.first; j < base.last(); ++j)
            d.discontinuities.push_back(base.center(j) + 0.5 * base.width);
        d.center = 0.5 * (d.lo + d.hi);
        d.scale = d.hi - d.lo;
        return d;
    }

  private:
    friend ReconstructedPdf reconstruct_pdf(const BinnedDistribution&, const GhfSpec&);

    double kernel(double z) const
    {
        if (z < -0.5 * ghf.eta || z >= 0.5 * ghf.eta)
            return 0.0;
        return std::exp(-ghf.shape() * z * z - log_z_) / ghf.eta;
    }

    double norm_ = 1.0;
    double log_z_ = 0.0;
};

inline void require_same_width(const BinnedDistribution& b, const GhfSpec& g)
{
    if (std::abs(b.width - g.eta) > 1e-12 * b.width)
        throw WidthMismatch("GHF width differs from the bin width");
}

inline ReconstructedPdf reconstruct_pdf(const BinnedDistribution& b, const GhfSpec& g)
{
    g.validate();
    require_same_width(b, g);
    ReconstructedPdf w;
    w.base = b;
    w.ghf = g;
    w.norm_ = b.total();
    const double t = g.shape() * g.eta * g.eta;
    w.log_z_ = unit_ghf(t).log_z1;
    return w;
}

struct DecomposedStats
{
    double variance_total = 0.0;
    double entropy_total = 0.0;
};

/// Variance and Shannon entropy of the reconstructed PDF via the split into
/// a discrete part and a per-bin GHF part.
inline DecomposedStats decompose_stats(const BinnedDistribution& b, const GhfSpec& g)
{
    g.validate();
    require_same_width(b, g);
    return {discrete_variance(b) + ghf_variance(g), discrete_renyi(b, 1.0) + ghf_entropy(g)};
}

// ---------------------------------------------------------------------------
// Finite statistics
// ---------------------------------------------------------------------------

/// Number of nodes of the tabulated CDF used for inverse-CDF sampling.
inline constexpr std::size_t sampling_grid_points = 1u << 16;

namespace detail
{

// Window [lo, hi] outside which d carries at most tail_budget mass.
inline std::pair<double, double> sampling_window(const states::Density1D& d)
{
    if (std::isfinite(d.lo) && std::isfinite(d.hi))
        return {d.lo, d.hi};
    if (d.heavy_tail)
    {
        double half = std::max(d.scale, d.heavy_tail->panel);
        while (d.heavy_tail->mass_beyond(half) > tail_budget)
            half *= 1.25;
        return {std::max(d.lo, d.center - half), std::min(d.hi, d.center + half)};
    }
    double half = d.scale;
    for (int i = 0; i < 200; ++i)
    {
        const double lo = std::max(d.lo, d.center - half);
        const double hi = std::min(d.hi, d.center + half);
        const double inside = states::integrate_interval(d, [&](double z) { return d(z); }, lo, hi);
        if (1.0 - inside <= tail_budget)
            return {lo, hi};
        half *= 1.25;
    }
    throw TailBudgetExceeded("sample_counts: could not bracket the density's mass");
}

} // namespace detail

/// Empirical bin frequencies of n draws from d, by inverse CDF over a
/// tabulated, linearly interpolated CDF. Deterministic for a given seed.
inline BinnedDistribution sample_counts(const states::Density1D& d, double width, double offset, std::uint64_t n,
                                        std::uint64_t seed)
{
    if (n < 1)
        throw DomainError("sample_counts: need at least one sample");
    if (!(width > 0.0))
        throw DomainError("sample_counts: width must be positive");

    const auto [lo, hi] = detail::sampling_window(d);
    const std::size_t m = sampling_grid_points;
    const double h = (hi - lo) / static_cast<double>(m - 1);
    std::vector<double> nodes(m);
    std::vector<double> cdf(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        nodes[i] = lo + h * static_cast<double>(i);
    nodes.back() = hi;
    for (std::size_t i = 1; i < m; ++i)
        cdf[i] = cdf[i - 1] +
                 states::integrate_interval(d, [&](double z) { return d(z); }, nodes[i - 1], nodes[i], bin_quad);
    const double total = cdf.back();
    for (double& c : cdf)
        c /= total;

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<long> index(n);
    long jmin = std::numeric_limits<long>::max();
    long jmax = std::numeric_limits<long>::min();
    for (std::uint64_t k = 0; k < n; ++k)
    {
        const double u = unif(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t i = static_cast<std::size_t>(it - cdf.begin());
        i = std::clamp<std::size_t>(i, 1, m - 1);
        const double c0 = cdf[i - 1];
        const double c1 = cdf[i];
        const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
        const double x = nodes[i - 1] + frac * (nodes[i] - nodes[i - 1]);
        const long j = bin_index(x, width, offset);
        index[k] = j;
        jmin = std::min(jmin, j);
        jmax = std::max(jmax, j);
    }

    BinnedDistribution b;
    b.width = width;
    b.offset = offset;
    b.first = jmin;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(jmax - jmin + 1), 0);
    for (long j : index)
        ++counts[static_cast<std::size_t>(j - jmin)];
    b.probs.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        b.probs[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    b.tail_mass = 0.0;
    return b;
}

} // namespace cgur::coarse

#endif // CGUR_COARSE_HPP
