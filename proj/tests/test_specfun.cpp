#include <cmath>
#include <numbers>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "cgur/numerics.hpp"
#include "cgur/specfun.hpp"

namespace sf = cgur::specfun;

namespace
{

// Maclaurin series of erf, summed in 50-digit arithmetic.
double erf_series(double x)
{
    using big = boost::multiprecision::cpp_bin_float_50;
    big term = x;
    big sum = 0;
    const big x2 = big(x) * x;
    for (int n = 0; n < 400; ++n)
    {
        sum += term / (2 * n + 1);
        term *= -x2 / (n + 1);
        if (abs(term) < big("1e-45"))
            break;
    }
    return static_cast<double>(2 * sum / sqrt(boost::math::constants::pi<big>()));
}

// Dawson's integral from its odd power series sum (-2)^n y^(2n+1) / (2n+1)!!.
double dawson_series(double y)
{
    using big = boost::multiprecision::cpp_bin_float_50;
    big term = y;
    big sum = 0;
    const big y2 = big(y) * y;
    for (int n = 0; n < 2000; ++n)
    {
        sum += term;
        term *= -2 * y2 / (2 * n + 3);
        if (abs(term) < big("1e-40") * abs(sum))
            break;
    }
    return static_cast<double>(sum);
}

} // namespace

TEST(Erf, OddAndSaturating)
{
    EXPECT_EQ(sf::erf(0.0), 0.0);
    EXPECT_NEAR(sf::erf(10.0), 1.0, 1e-15);
    for (double x : {0.1, 0.7, 1.3, 2.9, 5.0})
        EXPECT_EQ(sf::erf(-x), -sf::erf(x));
}

TEST(Erf, MatchesDefiningIntegral)
{
    const cgur::numerics::QuadSpec tight{1e-17, 1e-15, 2000};
    const double integral =
        2.0 / std::sqrt(std::numbers::pi) *
        cgur::numerics::integrate([](double t) { return std::exp(-t * t); }, 0.0, 1.0, tight);
    EXPECT_NEAR(sf::erf(1.0), integral, 1e-14);
    EXPECT_NEAR(sf::erf(1.0), 0.8427007929497149, 1e-15);
}

TEST(Erf, MatchesExtendedPrecisionSeries)
{
    for (double x : {0.05, 0.5, 1.0, 2.0, 3.5})
        EXPECT_NEAR(sf::erf(x) / erf_series(x), 1.0, 1e-14) << "x=" << x;
}

TEST(Dawson, MatchesPowerSeries)
{
    for (double y : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0})
        EXPECT_NEAR(sf::dawson(y) / dawson_series(y), 1.0, 1e-13) << "y=" << y;
    EXPECT_EQ(sf::dawson(0.0), 0.0);
    EXPECT_EQ(sf::dawson(-1.5), -sf::dawson(1.5));
}

TEST(Dawson, AsymptoticBranchJoinsSmoothly)
{
    const double below = sf::dawson(49.999999);
    const double above = sf::dawson(50.000001);
    // 40-digit reference values of sqrt(pi)/2 exp(-y^2) erfi(y).
    EXPECT_NEAR(below / 0.01000200140132180720, 1.0, 1e-13);
    EXPECT_NEAR(above / 0.01000200100108156687, 1.0, 1e-13);
    EXPECT_NEAR(sf::dawson(1e4) * 2e4, 1.0, 1e-8);
}

TEST(SphericalBessel, ClosedFormsLowOrder)
{
    for (double x : {0.3, 2.0, 7.5, 31.0})
    {
        const auto j = sf::spherical_bessel_j<double>(4, x);
        const double s = std::sin(x);
        const double c = std::cos(x);
        EXPECT_NEAR(j[0], s / x, 1e-14);
        EXPECT_NEAR(j[1], s / (x * x) - c / x, 1e-14);
        EXPECT_NEAR(j[2], (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x), 1e-14);
    }
}

TEST(Prolate, ZeroBandwidthLimit)
{
    const auto r = sf::prolate_r00(0.0);
    EXPECT_EQ(r.r00_at_1, 1.0);
    EXPECT_EQ(r.lambda0, 0.0);
    EXPECT_NEAR(sf::prolate_r00(1e-4).r00_at_1, 1.0, 1e-6);
    EXPECT_THROW(sf::prolate_r00(-1.0), cgur::DomainError);
}

TEST(Prolate, ExpansionAgreesWithNystromOracle)
{
    for (double c : {0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0})
    {
        const double expansion = sf::prolate_r00(c).lambda0;
        const double oracle = sf::sinc_eigen_oracle(c);
        EXPECT_LE(std::abs(expansion - oracle) / oracle, 1e-6) << "c=" << c;
        EXPECT_NEAR(expansion, oracle, 1e-12 * oracle) << "c=" << c;
    }
}

TEST(Prolate, EigenvalueInsideUnitIntervalAndIncreasing)
{
    double previous = 0.0;
    for (double c = 0.125; c <= 40.0; c *= 1.5)
    {
        const auto r = sf::prolate_r00(c);
        EXPECT_GT(r.lambda0, 0.0);
        EXPECT_GT(r.leakage, 0.0) << "c=" << c;
        EXPECT_GE(r.lambda0, previous) << "c=" << c;
        // Strict increase is visible in the leakage once lambda0 rounds to 1.
        previous = r.lambda0;
    }
    double previous_leak = 1.0;
    for (double c = 0.125; c <= 300.0; c *= 1.5)
    {
        const double leak = sf::prolate_r00(c).leakage;
        EXPECT_LT(leak, previous_leak) << "c=" << c;
        previous_leak = leak;
    }
}

TEST(Prolate, LeakageConsistentWithEigenvalue)
{
    for (double c : {0.5, 1.0, 3.0})
    {
        const auto r = sf::prolate_r00(c);
        EXPECT_NEAR(r.leakage, 1.0 - r.lambda0, 1e-15);
        EXPECT_NEAR(r.lambda0, 2.0 * c / std::numbers::pi * r.r00_at_1 * r.r00_at_1, 1e-15);
    }
}

TEST(Prolate, LargeBandwidthJoinsAsymptote)
{
    const auto edge = sf::prolate_r00(sf::prolate_c_max);
    EXPECT_NEAR(edge.log_leakage, sf::log_leakage_asymptotic(sf::prolate_c_max), 1e-5);
    const auto beyond = sf::prolate_r00(sf::prolate_c_max + 1e-6);
    EXPECT_NEAR(beyond.log_leakage, edge.log_leakage, 1e-5);
    // lambda0 is 1 to double precision on both sides, so R00 = sqrt(pi / 2c).
    EXPECT_NEAR(edge.r00_at_1 / std::sqrt(std::numbers::pi / (2.0 * sf::prolate_c_max)), 1.0, 1e-12);
    EXPECT_NEAR(beyond.r00_at_1 / std::sqrt(std::numbers::pi / (2.0 * beyond.c)), 1.0, 1e-15);
    EXPECT_NEAR(sf::prolate_r00(1000.0).r00_at_1, std::sqrt(std::numbers::pi / 2000.0), 1e-15);
}

TEST(NystromOracle, SmallBandwidthLimit)
{
    const double c = 0.01;
    EXPECT_NEAR(sf::sinc_eigen_oracle(c) / (2.0 * c / std::numbers::pi), 1.0, 0.01);
}

TEST(NystromOracle, ConcentrationApproachesOne)
{
    const double l10 = sf::sinc_eigen_oracle(10.0);
    EXPECT_GT(l10, 0.999);
    EXPECT_LT(l10, 1.0);
    EXPECT_GT(sf::sinc_eigen_oracle(2.0), sf::sinc_eigen_oracle(1.0));
    EXPECT_THROW(sf::sinc_eigen_oracle(0.0), cgur::DomainError);
}
