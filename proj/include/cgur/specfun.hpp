#ifndef CGUR_SPECFUN_HPP
#define CGUR_SPECFUN_HPP

// Special functions needed by the entropic bounds: the error function and
// Dawson's integral, spherical Bessel functions, the radial prolate
// spheroidal function R00(c, 1) and the top eigenvalue of the sinc kernel
// on [-1, 1] computed independently by Nystrom discretisation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cgur/errors.hpp"
#include "cgur/numerics.hpp"

namespace cgur::specfun
{

/// Error function. Backed by the C library, which is accurate to ~1 ulp.
inline double erf(double x) { return std::erf(x); }

inline double erfc(double x) { return std::erfc(x); }

/// Dawson's integral D(y) = exp(-y^2) * int_0^y exp(s^2) ds.
inline double dawson(double y)
{
    if (y < 0.0)
        return -dawson(-y);
    if (y == 0.0)
        return 0.0;
    if (y > 50.0)
    {
        // Asymptotic series; terms shrink by (2k+1)/(2y^2).
        const double inv = 1.0 / (2.0 * y * y);
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 12; ++k)
        {
            term *= (2.0 * k - 1.0) * inv;
            sum += term;
        }
        return sum / (2.0 * y);
    }
    // Substituting s = y - w keeps the integrand in (0, 1]. It decays over
    // w ~ 1/(2y), so the panels start there and double.
    auto integrand = [y](double w) { return std::exp(-w * (2.0 * y - w)); };
    double total = 0.0;
    double left = 0.0;
    for (double right = std::min(y, 0.5 / y); left < y; right = std::min(y, 2.0 * right))
    {
        total += numerics::integrate(integrand, left, right, {1e-300, 1e-15, 4000});
        left = right;
    }
    return total;
}

/// Spherical Bessel functions j_0(x) .. j_nmax(x) by Miller's downward
/// recurrence, normalised with sum_n (2n+1) j_n(x)^2 = 1. Requires x > 0.
template <typename T>
std::vector<T> spherical_bessel_j(int nmax, const T& x, int guard_digits = 20)
{
    using std::abs;
    using std::cos;
    using std::sin;
    using std::sqrt;
    if (!(x > 0))
        throw DomainError("spherical_bessel_j: argument must be positive");

    const double xd = static_cast<double>(x);
    const int start = std::max(nmax, static_cast<int>(std::ceil(std::numbers::e * xd))) +
                      guard_digits + 20;
    std::vector<T> j(static_cast<std::size_t>(start) + 2, T(0));
    j[static_cast<std::size_t>(start)] = T(1e-30);
    const T big(1e100);
    for (int n = start; n >= 1; --n)
    {
        const auto un = static_cast<std::size_t>(n);
        j[un - 1] = T(2 * n + 1) / x * j[un] - j[un + 1];
        if (abs(j[un - 1]) > big)
        {
            for (std::size_t m = un - 1; m <= static_cast<std::size_t>(start); ++m)
                j[m] /= big;
        }
    }

    T norm(0);
    for (int n = start; n >= 0; --n)
    {
        const auto un = static_cast<std::size_t>(n);
        norm += T(2 * n + 1) * j[un] * j[un];
    }
    T scale = T(1) / sqrt(norm);

    // The normalisation fixes the magnitude; take the sign from whichever of
    // j_0, j_1 is larger in closed form.
    const T j0 = sin(x) / x;
    const T j1 = sin(x) / (x * x) - cos(x) / x;
    if (abs(j0) >= abs(j1))
    {
        if ((j0 < 0) != (j[0] < 0))
            scale = -scale;
    }
    else if ((j1 < 0) != (j[1] < 0))
    {
        scale = -scale;
    }

    std::vector<T> out(static_cast<std::size_t>(nmax) + 1);
    for (int n = 0; n <= nmax; ++n)
        out[static_cast<std::size_t>(n)] = j[static_cast<std::size_t>(n)] * scale;
    return out;
}

struct ProlateResult
{
    double c = 0.0;
    double r00_at_1 = 1.0;
    /// Largest concentration eigenvalue (2c/pi) R00(c,1)^2.
    double lambda0 = 0.0;
    /// 1 - lambda0, resolved in extended precision when lambda0 is close to 1.
    double leakage = 1.0;
    /// ln(1 - lambda0); stays finite where the leakage itself underflows.
    double log_leakage = 0.0;
    int terms_used = 0;
    double est_error = 0.0;
};

namespace detail
{

// Symmetric tridiagonal form of the three-term recurrence for the even
// Legendre coefficients d_r of the (0,0) spheroidal function.
template <typename T>
void prolate_tridiagonal(const T& c, int terms, std::vector<T>& diag, std::vector<T>& off)
{
    using std::sqrt;
    const T c2 = c * c;
    diag.assign(static_cast<std::size_t>(terms), T(0));
    off.assign(static_cast<std::size_t>(std::max(terms - 1, 0)), T(0));
    for (int k = 0; k < terms; ++k)
    {
        const T r(2 * k);
        diag[static_cast<std::size_t>(k)] =
            r * (r + 1) + c2 * (2 * r * (r + 1) - 1) / ((2 * r + 3) * (2 * r - 1));
        if (k + 1 < terms)
            off[static_cast<std::size_t>(k)] =
                (r + 2) * (r + 1) * c2 / ((2 * r + 3) * sqrt((2 * r + 1) * (2 * r + 5)));
    }
}

// Number of eigenvalues of the tridiagonal matrix strictly below x.
inline int sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x)
{
    int count = 0;
    double q = diag[0] - x;
    if (q < 0.0)
        ++count;
    for (std::size_t i = 1; i < diag.size(); ++i)
    {
        if (q == 0.0)
            q = 1e-300;
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if (q < 0.0)
            ++count;
    }
    return count;
}

// Solves (S - shift I) y = rhs for symmetric tridiagonal S by Gaussian
// elimination; tiny pivots are nudged rather than rejected since the shift
// is deliberately close to an eigenvalue.
template <typename T>
std::vector<T> shifted_solve(const std::vector<T>& diag, const std::vector<T>& off, const T& shift,
                             std::vector<T> rhs)
{
    using std::abs;
    const std::size_t n = diag.size();
    std::vector<T> pivot(n);
    std::vector<T> upper(n);
    const T tiny = std::numeric_limits<T>::epsilon() * std::numeric_limits<T>::epsilon();
    pivot[0] = diag[0] - shift;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (i > 0)
        {
            const T l = off[i - 1] / pivot[i - 1];
            pivot[i] = diag[i] - shift - l * off[i - 1];
            rhs[i] -= l * rhs[i - 1];
        }
        if (abs(pivot[i]) < tiny)
            pivot[i] = tiny;
        upper[i] = (i + 1 < n) ? off[i] : T(0);
    }
    std::vector<T> y(n);
    y[n - 1] = rhs[n - 1] / pivot[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        y[i] = (rhs[i] - upper[i] * y[i + 1]) / pivot[i];
    return y;
}

template <typename T>
T normalise(std::vector<T>& v)
{
    using std::sqrt;
    T norm(0);
    for (const auto& x : v)
        norm += x * x;
    norm = sqrt(norm);
    for (auto& x : v)
        x /= norm;
    return norm;
}

// Lowest eigenpair: bisection in double, then Rayleigh quotient iteration
// in T to reach the working precision of T.
template <typename T>
std::vector<T> lowest_eigenvector(const std::vector<T>& diag, const std::vector<T>& off)
{
    using std::abs;
    const std::size_t n = diag.size();
    std::vector<double> dd(n);
    std::vector<double> od(off.size());
    for (std::size_t i = 0; i < n; ++i)
        dd[i] = static_cast<double>(diag[i]);
    for (std::size_t i = 0; i < off.size(); ++i)
        od[i] = static_cast<double>(off[i]);

    double lo = dd[0];
    double hi = dd[0];
    for (std::size_t i = 0; i < n; ++i)
    {
        const double radius = (i > 0 ? std::abs(od[i - 1]) : 0.0) + (i < od.size() ? std::abs(od[i]) : 0.0);
        lo = std::min(lo, dd[i] - radius);
        hi = std::max(hi, dd[i] + radius);
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++iter)
    {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(dd, od, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }

    T mu(0.5 * (lo + hi));
    std::vector<T> v(n, T(1));
    normalise(v);
    // Two inverse-iteration steps at the double-precision shift.
    for (int i = 0; i < 2; ++i)
    {
        v = shifted_solve(diag, off, mu, v);
        normalise(v);
    }
    const T eps = std::numeric_limits<T>::epsilon();
    for (int iter = 0; iter < 8; ++iter)
    {
        T rq(0);
        for (std::size_t i = 0; i < n; ++i)
        {
            T sv = diag[i] * v[i];
            if (i > 0)
                sv += off[i - 1] * v[i - 1];
            if (i + 1 < n)
                sv += off[i] * v[i + 1];
            rq += v[i] * sv;
        }
        const bool done = abs(rq - mu) <= 4 * eps * (abs(rq) + 1);
        mu = rq;
        if (done)
            break;
        v = shifted_solve(diag, off, mu, v);
        normalise(v);
    }
    return v;
}

// R00(c, 1) from a truncated Legendre expansion with `terms` even coefficients.
template <typename T>
T r00_expansion(const T& c, int terms)
{
    using std::sqrt;
    std::vector<T> diag;
    std::vector<T> off;
    prolate_tridiagonal(c, terms, diag, off);
    const std::vector<T> v = lowest_eigenvector(diag, off);
    const std::vector<T> jn =
        spherical_bessel_j<T>(2 * terms, c, std::numeric_limits<T>::digits10 + 5);

    // Undo the symmetrising similarity: d_k = v_k / s_k with
    // s_{k+1} = s_k * sqrt((2r+1)/(2r+5)), r = 2k.
    T scale(1);
    T numerator(0);
    T denominator(0);
    for (int k = 0; k < terms; ++k)
    {
        const auto uk = static_cast<std::size_t>(k);
        const T d = v[uk] / scale;
        const T term = d * jn[2 * uk];
        numerator += (k % 2 == 0) ? term : T(-term);
        denominator += d;
        const T r(2 * k);
        scale *= sqrt((2 * r + 1) / (2 * r + 5));
    }
    return numerator / denominator;
}

template <typename T>
int default_terms(double c)
{
    return 24 + static_cast<int>(std::ceil(c)) + std::numeric_limits<T>::digits10 / 2;
}

template <typename T>
ProlateResult prolate_in(double c_value)
{
    using std::abs;
    const T c(c_value);
    const T pi = boost::math::constants::pi<T>();
    int terms = default_terms<T>(c_value);
    T r00 = r00_expansion(c, terms);
    T est(0);
    // Rounding noise floor of the alternating Bessel series.
    const T noise = std::numeric_limits<T>::epsilon() * T(std::pow(10.0, 3.0 + 0.45 * c_value));
    for (int attempt = 0; attempt < 8; ++attempt)
    {
        const int more = terms + 12 + terms / 4;
        const T refined = r00_expansion(c, more);
        est = abs(refined - r00);
        r00 = refined;
        terms = more;
        if (est <= noise * abs(r00) || est < T(1e-300))
            break;
        if (attempt == 7)
            throw NonConvergence("prolate_r00: Legendre expansion did not stabilise");
    }
    const T lambda = 2 * c / pi * r00 * r00;
    ProlateResult out;
    out.c = c_value;
    out.r00_at_1 = static_cast<double>(r00);
    out.lambda0 = static_cast<double>(lambda);
    out.leakage = static_cast<double>(T(1) - lambda);
    out.terms_used = terms;
    out.est_error = static_cast<double>(est);
    return out;
}

} // namespace detail

/// Largest spheroidal parameter evaluated by the Legendre expansion; beyond
/// it 1 - lambda0 is below 1e-307 and the large-c asymptote takes over.
inline constexpr double prolate_c_max = 356.0;

/// ln(1 - lambda0) ~ ln(4 sqrt(pi c)) - 2c - 7/(16c) for large c. The 1/c
/// term was fitted against the expansion, which it matches to 2e-6 at c_max.
inline double log_leakage_asymptotic(double c)
{
    return std::log(4.0 * std::sqrt(std::numbers::pi * c)) - 2.0 * c - 7.0 / (16.0 * c);
}

/// Radial prolate spheroidal function R00(c, 1) of the first kind, its
/// concentration eigenvalue lambda0 = (2c/pi) R00^2 and the leakage 1 - lambda0.
///
/// The angular coefficients come from the lowest eigenvector of the
/// symmetric tridiagonal recurrence matrix; the radial value at xi = 1 is
/// the spherical-Bessel series sum (-1)^(r/2) d_r j_r(c) / sum d_r. The
/// alternating series cancels roughly 0.45c decimal digits and the leakage
/// needs another 0.87c, so above c = 4 the evaluation runs in multiprecision
/// sized to keep both.
inline ProlateResult prolate_r00(double c)
{
    if (!(c >= 0.0) || !std::isfinite(c))
        throw DomainError("prolate_r00: c must be finite and non-negative");
    if (c > prolate_c_max)
    {
        // lambda0 rounds to 1, so R00 = sqrt(pi / (2c)) to full precision.
        ProlateResult far;
        far.c = c;
        far.lambda0 = 1.0;
        far.log_leakage = log_leakage_asymptotic(c);
        far.leakage = std::exp(far.log_leakage);
        far.r00_at_1 = std::sqrt(std::numbers::pi / (2.0 * c));
        return far;
    }
    if (c == 0.0)
        return ProlateResult{0.0, 1.0, 0.0, 1.0, 0.0, 0, 0.0};

    namespace mp = boost::multiprecision;
    ProlateResult result;
    if (c <= 4.0)
        result = detail::prolate_in<double>(c);
    else if (c <= 15.0)
        result = detail::prolate_in<mp::number<mp::cpp_bin_float<50>>>(c);
    else if (c <= 68.0)
        result = detail::prolate_in<mp::number<mp::cpp_bin_float<120>>>(c);
    else if (c <= 166.0)
        result = detail::prolate_in<mp::number<mp::cpp_bin_float<250>>>(c);
    else
        result = detail::prolate_in<mp::number<mp::cpp_bin_float<500>>>(c);
    if (result.est_error > 1e-10 * std::abs(result.r00_at_1))
        throw NonConvergence("prolate_r00: truncation error above 1e-10");
    result.log_leakage = std::log(result.leakage);
    return result;
}

/// Largest eigenvalue of the kernel sin(c(x-y)) / (pi (x-y)) on [-1, 1] by
/// Nystrom discretisation on Gauss-Legendre nodes. The node count doubles
/// until two successive estimates agree to `rel_tol`.
inline double sinc_eigen_oracle(double c, double rel_tol = 1e-12)
{
    if (!(c > 0.0) || !std::isfinite(c))
        throw DomainError("sinc_eigen_oracle: c must be positive and finite");

    auto top_eigenvalue = [c](std::size_t n) {
        const auto [x, w] = numerics::gauss_legendre(n);
        Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
        {
            for (std::size_t j = 0; j <= i; ++j)
            {
                const double dx = x[i] - x[j];
                const double kernel =
                    (i == j) ? c / std::numbers::pi : std::sin(c * dx) / (std::numbers::pi * dx);
                const double value = std::sqrt(w[i] * w[j]) * kernel;
                a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
                a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().maxCoeff();
    };

    std::size_t n = 16;
    double previous = top_eigenvalue(n);
    while (n < 2048)
    {
        n *= 2;
        const double current = top_eigenvalue(n);
        if (std::abs(current - previous) <= rel_tol * std::abs(current))
            return current;
        previous = current;
    }
    std::ostringstream msg;
    msg << "sinc_eigen_oracle: eigenvalue did not stabilise for c=" << c;
    throw NonConvergence(msg.str());
}

} // namespace cgur::specfun

#endif // CGUR_SPECFUN_HPP
