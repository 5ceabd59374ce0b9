#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "cgur/bounds.hpp"
#include "cgur/specfun.hpp"

using namespace cgur::bounds;
namespace st = cgur::states;

namespace
{

constexpr double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;

// M(t) straight from its definition in 50-digit arithmetic.
double M_direct(double t)
{
    using big = boost::multiprecision::cpp_bin_float_50;
    const big bt = t;
    const big pi = boost::math::constants::pi<big>();
    return static_cast<double>(exp(-bt / 4) / (2 * sqrt(pi * bt) * boost::math::erf(sqrt(bt) / 2)));
}

const cgur::RelationReport& find(const std::vector<cgur::RelationReport>& v, cgur::RelationId id)
{
    for (const auto& r : v)
        if (r.relation_id == id)
            return r;
    throw std::runtime_error("relation missing");
}

st::StateModel gaussian(double sigma) { return {st::Gaussian{0.0, 0.0, sigma}, 1.0}; }

} // namespace

TEST(BoundB, ZeroAtEndpoints)
{
    EXPECT_NEAR(bound_B(2.0 * std::numbers::pi, 1.0, 1.0, 0.5), 0.0, 1e-15);
    EXPECT_NEAR(bound_B(std::numbers::pi * std::numbers::e, 1.0, 1.0, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(bound_B(1.0, 1.0, 1.0, 1.0), std::log(std::numbers::pi * std::numbers::e), 1e-15);
}

TEST(BoundB, IncreasingInOrder)
{
    const double b75 = bound_B(1.0, 1.0, 1.0, 0.75);
    EXPECT_GT(b75, bound_B(1.0, 1.0, 1.0, 0.5));
    EXPECT_LT(b75, bound_B(1.0, 1.0, 1.0, 1.0));
    // Direct formula with the conjugate order beta = 3/2.
    const double oracle = -0.5 * (std::log(0.75) / 0.25 + std::log(1.5) / -0.5) + std::log(std::numbers::pi);
    EXPECT_NEAR(b75, oracle, 1e-14);
    double previous = -INFINITY;
    for (int i = 0; i < 20; ++i)
    {
        const double a = 0.5 + 0.5 * i / 19.0;
        const double b = bound_B(0.8, 1.7, 1.0, a);
        EXPECT_GT(b, previous) << "alpha=" << a;
        previous = b;
    }
}

TEST(BoundB, ContinuousAtOrderOne)
{
    EXPECT_NEAR(bound_B(1.0, 1.0, 1.0, 1.0 - 1e-9), bound_B(1.0, 1.0, 1.0, 1.0), 1e-8);
}

TEST(BoundB, InputValidation)
{
    EXPECT_THROW(bound_B(0.0, 1.0, 1.0, 1.0), cgur::DomainError);
    EXPECT_THROW(bound_B(1.0, 1.0, 1.0, 0.4), cgur::DomainError);
    EXPECT_THROW(bound_R(1.0, -1.0, 1.0), cgur::DomainError);
}

TEST(BoundR, SmallCellsApproachHalfOrderBound)
{
    EXPECT_LT(std::abs(bound_R(0.01, 1.0, 1.0) - bound_B(0.01, 1.0, 1.0, 0.5)), 0.01);
}

TEST(BoundR, MatchesNystromOracle)
{
    EXPECT_NEAR(bound_R(4.0, 1.0, 1.0), -std::log(cgur::specfun::sinc_eigen_oracle(1.0)), 1e-8);
    const double r40 = bound_R(40.0, 1.0, 1.0);
    EXPECT_GT(r40, 0.0);
    EXPECT_LT(r40, 1e-3);
    EXPECT_NEAR(r40, -std::log(cgur::specfun::sinc_eigen_oracle(10.0)), 1e-3 * r40);
}

TEST(BoundR, DependsOnlyOnCellArea)
{
    EXPECT_NEAR(bound_R(2.0, 3.0, 1.5), bound_R(4.0, 1.0, 1.0), 1e-14);
}

TEST(BoundR, DominatesHalfOrderBound)
{
    for (double x : cgur::numerics::make_grid(1e-3, 1e3, 61, true))
        EXPECT_GE(bound_R(x, 1.0, 1.0), bound_B(x, 1.0, 1.0, 0.5)) << "x=" << x;
}

TEST(BoundL, GEqualsOneForSmallCells)
{
    const auto b = bound_L(1e-3, 1e-3, 1.0, 1.0);
    EXPECT_EQ(b.g, 1.0);
    EXPECT_EQ(b.L_alpha, b.B_alpha);
    EXPECT_EQ(bound_L(1.0, 1.0, 1.0, 1.0).L_alpha, bound_B(1.0, 1.0, 1.0, 1.0));
}

TEST(BoundL, ProlateBoundTakesOverForLargeCells)
{
    const auto b = bound_L(12.0, 1.0, 1.0, 1.0);
    EXPECT_GT(b.R, b.B_alpha);
    EXPECT_EQ(b.L_alpha, b.R);
    EXPECT_GT(b.g, 1.0);
    // g = (Delta delta / (pi e hbar))^2 exp(2R) written out.
    const double ratio = 12.0 / (std::numbers::pi * std::numbers::e);
    EXPECT_NEAR(b.g, ratio * ratio * std::exp(2.0 * b.R), 1e-12 * b.g);
}

TEST(BoundL, ProductFormMatchesAtModerateCells)
{
    const auto pr = cgur::specfun::prolate_r00(9.0 / 4.0);
    const double r2 = pr.r00_at_1 * pr.r00_at_1;
    const auto b = bound_L(9.0, 1.0, 1.0, 1.0);
    EXPECT_NEAR(b.g, std::max(1.0, 4.0 / (std::exp(2.0) * r2 * r2)), 1e-12);
}

TEST(Crossing, SingleAndAtGSwitch)
{
    int sign_changes = 0;
    double previous = 0.0;
    for (double x : cgur::numerics::make_grid(0.1, 100.0, 400, true))
    {
        const double d = bound_R(x, 1.0, 1.0) - bound_B(x, 1.0, 1.0, 1.0);
        if (previous != 0.0 && (d > 0.0) != (previous > 0.0))
            ++sign_changes;
        previous = d;
    }
    EXPECT_EQ(sign_changes, 1);
    const double cross = find_r_b1_crossing();
    EXPECT_GT(cross, 5.5);
    EXPECT_LT(cross, 7.5);
    EXPECT_NEAR(cross, find_g_switch(), 1e-9);
}

TEST(FuncM, SmallArgumentSeries)
{
    const double t = 1e-10;
    EXPECT_NEAR(func_M(t) / M_direct(t), 1.0, 1e-13);
    EXPECT_NEAR(func_M(t) / (0.5 / t - 1.0 / 12.0), 1.0, 1e-6);
    for (double x : {1e-4, 0.3, 1.0, 1.99, 2.01, 5.0, 30.0})
        EXPECT_NEAR(func_M(x) / M_direct(x), 1.0, 1e-13) << "t=" << x;
}

TEST(FuncM, LargeArgumentAsymptote)
{
    const double t = 700.0;
    const double asym = -0.25 * t - std::log(2.0 * std::sqrt(std::numbers::pi * t));
    EXPECT_NEAR(log_func_M(t) / asym, 1.0, 1e-10);
}

TEST(FuncM, UnitArgumentAgainstQuadratureErf)
{
    const double e = 2.0 / std::sqrt(std::numbers::pi) *
                     cgur::numerics::integrate([](double s) { return std::exp(-s * s); }, 0.0, 0.5,
                                               {1e-17, 1e-15, 2000});
    EXPECT_NEAR(func_M(1.0), std::exp(-0.25) / (2.0 * std::sqrt(std::numbers::pi) * e), 1e-14);
}

TEST(FuncM, RootOfMMinusOne)
{
    auto f = [](double t) { return func_M(t) - 1.0; };
    double lo = 0.1, hi = 1.0;
    while (f(hi) > 0.0)
        hi *= 2.0;
    while (f(lo) < 0.0)
        lo /= 2.0;
    const double t = cgur::numerics::find_root_bracketed(f, lo, hi);
    EXPECT_NEAR(M_direct(t), 1.0, 1e-12);
}

TEST(FuncM, DecreasingAndValidated)
{
    double previous = INFINITY;
    for (double t : cgur::numerics::make_grid(1e-6, 50.0, 300, true))
    {
        const double m = func_M(t);
        EXPECT_LT(m, previous);
        previous = m;
    }
    EXPECT_THROW(func_M(0.0), cgur::DomainError);
    EXPECT_THROW(func_M_inv(-1.0), cgur::DomainError);
}

TEST(FuncMInv, Roundtrips)
{
    for (double u : {1e-6, 1e-2, 1.0, 1e4})
        EXPECT_NEAR(func_M(func_M_inv(u)), u, 1e-12 * std::max(1.0, u)) << "u=" << u;
    EXPECT_NEAR(func_M_inv(func_M(1.0)), 1.0, 1e-11);
    const double u = 1e8;
    EXPECT_NEAR(func_M_inv(u) * (2.0 * u + 1.0 / 6.0), 1.0, 1e-9);
}

TEST(FuncF, RectangleLimit)
{
    for (double u : {0.0, 0.01, 1.0, 50.0})
        EXPECT_NEAR(func_F(u, 1e-10) / (two_pi_e * (u + 1.0 / 12.0)), 1.0, 1e-4) << "u=" << u;
}

TEST(FuncF, MinimumIsK)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> lu(std::log(1e-6), std::log(1e4));
    std::uniform_real_distribution<double> lt(std::log(1e-4), std::log(200.0));
    for (int i = 0; i < 1000; ++i)
    {
        const double u = std::exp(lu(rng));
        const double t = std::exp(lt(rng));
        EXPECT_GE(log_func_F(u, t), log_func_K(u) - 1e-12) << "u=" << u << " t=" << t;
    }
    const double u0 = func_M(2.0);
    EXPECT_NEAR(log_func_F(u0, 2.0), log_func_K(u0), 1e-13);
}

TEST(FuncK, LimitsAndBounds)
{
    EXPECT_EQ(func_K(0.0), 1.0);
    EXPECT_NEAR(func_K(1e-8), 1.0, 1e-5);
    double previous = 0.0;
    for (double u : cgur::numerics::make_grid(1e-6, 1e6, 200, true))
    {
        const double k = func_K(u);
        EXPECT_LE(k, two_pi_e * (u + 1.0 / 12.0)) << "u=" << u;
        EXPECT_GE(k, previous) << "u=" << u;
        previous = k;
    }
    EXPECT_NEAR(func_K(1e6) / (two_pi_e * 1e6), 1.0, 1e-6);
    EXPECT_THROW(func_K(-1.0), cgur::DomainError);
}

TEST(FuncK, RecoversContinuousVarianceUnderRefinement)
{
    const double D = 1e-3;
    const auto b = cgur::coarse::bin_density(st::position_density(gaussian(1.0)), D, 0.0);
    const double v = cgur::coarse::discrete_variance(b);
    EXPECT_NEAR(D * D * func_K(v / (D * D)) / two_pi_e, 1.0, 1e-3);
}

TEST(CoarseRelations, GaussianNearSaturation)
{
    const auto reports = check_coarse_relations(gaussian(1.0), 1e-3, 1e-3, 1.0);
    ASSERT_EQ(reports.size(), 4u);
    for (const auto& r : reports)
        EXPECT_EQ(r.verdict, cgur::Verdict::holds) << to_string(r.relation_id);
    const auto& opt = find(reports, cgur::RelationId::HeisOptimal);
    EXPECT_GE(opt.margin, 0.0);
    EXPECT_LT(opt.margin, 1e-2);
}

TEST(CoarseRelations, SaturationTrend)
{
    double previous = INFINITY;
    for (double w : {1.0, 0.3, 0.1, 0.03, 0.01})
    {
        const double m = find(check_coarse_relations(gaussian(1.0), w, w, 1.0), cgur::RelationId::HeisOptimal).margin;
        EXPECT_LT(m, previous) << "width=" << w;
        EXPECT_GE(m, 0.0);
        previous = m;
    }
}

TEST(CoarseRelations, HypotheticalZeroVariancesInfeasible)
{
    const auto bs = bound_L(20.0, 1.0, 1.0, 1.0);
    const auto r = check_hypothetical(0.0, 0.0, bs);
    EXPECT_EQ(r.verdict, cgur::Verdict::infeasible_inputs);
    EXPECT_LT(r.margin, 0.0);
    EXPECT_EQ(check_hypothetical(1e3, 1e3, bs).verdict, cgur::Verdict::holds);
    EXPECT_THROW(check_hypothetical(-1.0, 0.0, bs), cgur::DomainError);
}

TEST(CoarseRelations, SquareWellWithCentredWellBin)
{
    const st::StateModel well{st::SquareWell{1, 1.0}, 1.0};
    CoarseCheckOptions opt;
    opt.offset_x = 0.5;
    const auto r = cgur::coarse::bin_density(st::position_density(well), 1.0, 0.5);
    EXPECT_EQ(cgur::coarse::discrete_variance(r), 0.0);
    const auto s = cgur::coarse::bin_density(st::momentum_density(well), 50.0, 0.0);
    EXPECT_GT(cgur::coarse::discrete_variance(s), 0.0);
    for (const auto& rep : check_coarse_relations(well, 1.0, 50.0, 1.0, opt))
        EXPECT_EQ(rep.verdict, cgur::Verdict::holds) << to_string(rep.relation_id);
}

TEST(CoarseRelations, HoldOnReducedGrid)
{
    const auto cat = st::catalog();
    for (std::size_t k : {0u, 3u, 5u, 7u})
    {
        const auto& [name, s] = cat[k];
        for (double D : {0.05, 0.5, 5.0})
            for (double d : {0.05, 1.0, 20.0})
                for (double alpha : {0.5, 1.0})
                    for (const auto& rep : check_coarse_relations(s, D, d, alpha, {0.5 * D, 0.5 * d, 0.0, 0.0}))
                        EXPECT_EQ(rep.verdict, cgur::Verdict::holds)
                            << name << " D=" << D << " d=" << d << " " << to_string(rep.relation_id)
                            << " margin=" << rep.margin;
    }
}

TEST(CoarseRelations, PreoptimisedWithTruncatedGaussian)
{
    CoarseCheckOptions opt;
    opt.ghf_a_x = 3.0;
    opt.ghf_a_p = -2.0;
    for (const auto& rep : check_coarse_relations(gaussian(0.7), 0.4, 0.9, 1.0, opt))
        EXPECT_EQ(rep.verdict, cgur::Verdict::holds) << to_string(rep.relation_id);
}

TEST(Region, OriginForbiddenFarCornerAllowed)
{
    for (double x : {1.0, 10.0, 100.0})
    {
        const auto reg = feasibility_region(x, 1.0, 1.0, {1e6, 3, false, 1e-6});
        EXPECT_EQ(reg.forbidden.front(), 1) << "x=" << x;
        EXPECT_EQ(reg.forbidden.back(), 0) << "x=" << x;
    }
}

TEST(Region, ShrinksWithCellArea)
{
    const RegionAxis axis{1e3, 101, true, 1e-30};
    const double f1 = feasibility_region(1.0, 1.0, 1.0, axis).forbidden_fraction();
    const double f10 = feasibility_region(10.0, 1.0, 1.0, axis).forbidden_fraction();
    const double f100 = feasibility_region(100.0, 1.0, 1.0, axis).forbidden_fraction();
    EXPECT_GT(f1, f10);
    EXPECT_GT(f10, f100);
    EXPECT_GT(f100, 0.0);
}

TEST(Region, AxisValidation)
{
    EXPECT_EQ((RegionAxis{1.0, 1, false, 1e-6}.values().size()), 1u);
    EXPECT_THROW((RegionAxis{1.0, 0, false, 1e-6}.values()), cgur::DomainError);
    EXPECT_THROW((RegionAxis{1.0, 5, true, 2.0}.values()), cgur::DomainError);
}
