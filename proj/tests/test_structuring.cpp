#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qs/structuring.hpp"
#include "support.hpp"

using namespace qs;
using qs::testing::sup_norm_diff;

namespace {

Grid log_grid(std::size_t n) { return make_grid(0.2, 5.0, n, Spacing::logarithmic); }

Density lognormal(const Grid& g, double mu, double sigma) { return density_from_params(LognormalParams{mu, sigma}, g); }

double priced(std::span<const double> F, const Density& m) {
    std::vector<double> y(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) y[i] = F[i] * m[i];
    return qs::testing::trapezoid(m.grid().points(), y);
}

}  // namespace

TEST(GrowthOptimal, NoViewIsTheBond) {
    const Grid g = log_grid(501);
    const Density m = lognormal(g, 0.0, 0.2);
    const Payoff f = growth_optimal_payoff(m, m);
    for (double v : f.values()) EXPECT_EQ(v, 1.0);
}

TEST(GrowthOptimal, LognormalDriftRatio) {
    const Grid g = log_grid(2001);
    const Density m = lognormal(g, 0.0, 0.2);
    const Density b = lognormal(g, 0.05, 0.2);
    const Payoff f = growth_optimal_payoff(b, m);
    const std::size_t mid = 1000;
    ASSERT_NEAR(g[mid], 1.0, 1e-12);
    EXPECT_NEAR(f[mid], std::exp(-0.03125), 1e-6);
    EXPECT_NEAR(std::exp(-0.03125), 0.96923, 1e-5);
    for (std::size_t i = 0; i < g.size(); i += 100) {
        EXPECT_NEAR(f[i], std::exp(1.25 * std::log(g[i]) - 0.03125), 1e-5 * f[i]);
    }
    EXPECT_LE(std::abs(f.budget_residual()), 1e-12);
}

TEST(GrowthOptimal, VolDownSignPattern) {
    const Grid g = log_grid(1001);
    const Payoff f = growth_optimal_payoff(lognormal(g, 0.0, 0.15), lognormal(g, 0.0, 0.2));
    EXPECT_LT(f[0], 1.0);
    EXPECT_LT(f[g.size() - 1], 1.0);
    EXPECT_GT(f[g.size() / 2], 1.0);
}

TEST(GrowthOptimal, ZeroMarketDensity) {
    const Grid g({0.0, 1.0, 2.0});
    EXPECT_QS_ERROR(growth_optimal_payoff(Density(g, {0.5, 0.5, 0.5}), Density(g, {0.0, 1.0, 0.0})),
                    Errc::zero_market_density);
}

TEST(RiskAdjusted, GrowthOptimizerKeepsF) {
    const Grid g = log_grid(1001);
    const Density m = lognormal(g, 0.0, 0.2);
    const Payoff f = growth_optimal_payoff(lognormal(g, 0.05, 0.2), m);
    const Payoff F = risk_adjusted_payoff(f, RiskProfile::constant(1.0), m);
    EXPECT_EQ(sup_norm_diff(F.values(), f.values()), 0.0);
}

TEST(RiskAdjusted, SquareRootForRTwo) {
    const Grid g = log_grid(2001);
    const Density m = lognormal(g, 0.0, 0.2);
    const Payoff f = growth_optimal_payoff(lognormal(g, 0.05, 0.2), m);
    const Payoff F = risk_adjusted_payoff(f, RiskProfile::constant(2.0), m);
    std::vector<double> root(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) root[i] = std::sqrt(f[i]);
    const double c = 1.0 / priced(root, m);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(F[i], c * root[i], 1e-12 * F[i]);
    EXPECT_LE(std::abs(F.budget_residual()), 1e-10);
}

TEST(RiskAdjusted, ExtremeRiskAversionHoldsTheBond) {
    const Grid g = log_grid(1001);
    const Density m = lognormal(g, 0.0, 0.2);
    const Payoff f = growth_optimal_payoff(lognormal(g, 0.05, 0.15), m);
    const Payoff F = risk_adjusted_payoff(f, RiskProfile::constant(1e6), m);
    for (double v : F.values()) EXPECT_NEAR(v, 1.0, 1e-4);
}

TEST(RiskAdjusted, ZerosUnderConstantR) {
    const Grid g = log_grid(201);
    const Density m = lognormal(g, 0.0, 0.2);
    std::vector<double> fv(g.size(), 0.0);
    for (std::size_t i = 50; i < 150; ++i) fv[i] = 2.0;
    const Payoff f(m, fv);
    const Payoff F = risk_adjusted_payoff(f, RiskProfile::constant(3.0), m);
    EXPECT_EQ(F[0], 0.0);
    EXPECT_GT(F[100], 0.0);
    EXPECT_LE(std::abs(F.budget_residual()), 1e-12);
    EXPECT_QS_ERROR(risk_adjusted_payoff(f, RiskProfile::affine(1.0, 1.0), m), Errc::nonpositive_payoff);
}

TEST(RiskAdjusted, NonPositiveRisk) {
    EXPECT_QS_ERROR(RiskProfile::constant(0.0), Errc::nonpositive_R);
    EXPECT_QS_ERROR(RiskProfile::constant(-2.0), Errc::nonpositive_R);
    const Grid g = log_grid(201);
    const Density m = lognormal(g, 0.0, 0.2);
    const Payoff f = growth_optimal_payoff(lognormal(g, 0.05, 0.15), m);
    const auto bad = RiskProfile::wealth_dependent([](double F) { return 1.0 - F; }, "bad");
    EXPECT_QS_ERROR(risk_adjusted_payoff(f, bad, m), Errc::nonpositive_R);
}

TEST(RiskAdjusted, WealthDependentMatchesSeparableSolution) {
    // R(F) = 1 + F gives ln F + F = ln f + const.
    const Grid g = log_grid(1001);
    const Density m = lognormal(g, 0.0, 0.2);
    const Payoff f = growth_optimal_payoff(lognormal(g, 0.05, 0.15), m);
    const Payoff F = risk_adjusted_payoff(f, RiskProfile::affine(1.0, 1.0), m);
    const double k = std::log(F[0]) + F[0] - std::log(f[0]);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(std::log(F[i]) + F[i] - std::log(f[i]), k, 1e-10);
    }
    EXPECT_LE(std::abs(F.budget_residual()), 1e-8);
}

TEST(RiskAdjusted, CollapsingCaraPayoffReportsFailure) {
    // Exponential utility wants F < 0 in the left tail here.
    const Grid g = log_grid(401);
    const Density m = lognormal(g, 0.0, 0.2);
    const Payoff f = growth_optimal_payoff(lognormal(g, 0.05, 0.15), m);
    try {
        (void)risk_adjusted_payoff(f, arrow_pratt_R(exponential_utility(0.5)), m);
        ADD_FAILURE() << "expected a numerical failure";
    } catch (const Error& e) {
        EXPECT_TRUE(e.code() == Errc::ode_step_failure || e.code() == Errc::budget_bracket_failure) << e.what();
    }
}

TEST(RiskAdjusted, MonotoneCouplingAndTies) {
    qs::testing::Rng rng(qs::testing::kSeed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const Grid g = log_grid(301);
    const Density m = lognormal(g, 0.0, 0.2);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<double> fv(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) fv[i] = 0.2 + 3.0 * U(rng);
        // Force ties.
        for (std::size_t i = 0; i + 7 < g.size(); i += 13) fv[i + 7] = fv[i];
        const Payoff f(m, fv);
        const RiskProfile risk = trial % 2 ? RiskProfile::constant(0.3 + 6.0 * U(rng))
                                           : RiskProfile::affine(0.2 + U(rng), 2.0 * U(rng));
        const Payoff F = risk_adjusted_payoff(f, risk, m);
        EXPECT_LE(std::abs(F.budget_residual()), kBudgetTolerance);
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (std::size_t j = i + 1; j < g.size(); j += 5) {
                if (fv[i] < fv[j]) EXPECT_LT(F[i], F[j]);
                if (fv[i] == fv[j]) EXPECT_EQ(F[i], F[j]);
            }
        }
    }
}

TEST(Design, NoViewsHoldsTheBond) {
    const Grid g = log_grid(1001);
    const Density m = lognormal(g, 0.0, 0.2);
    for (const RiskProfile& risk : {RiskProfile::constant(1.0), RiskProfile::constant(4.0), RiskProfile::affine(1, 1)}) {
        const Design d = design(m, {}, risk);
        EXPECT_EQ(sup_norm_diff(d.believed.values(), m.values()), 0.0);
        for (double v : d.growth_optimal.values()) EXPECT_EQ(v, 1.0);
        for (double v : d.payoff.values()) EXPECT_NEAR(v, 1.0, 1e-12);
    }
}

TEST(Design, VolViewGrowthOptimizer) {
    const Grid g = log_grid(1001);
    const Density m = lognormal(g, 0.0, 0.2);
    const std::vector<Likelihood> views{view_vol(m, 0.15)};
    const Design d = design(m, views, RiskProfile::constant(1.0));
    EXPECT_EQ(sup_norm_diff(d.payoff.values(), d.growth_optimal.values()), 0.0);
    const auto v = d.payoff.values();
    const std::size_t peak = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    const double forward = moments(m).mean;
    EXPECT_NEAR(g[peak], forward, 0.1);
    EXPECT_LT(v.front(), 1.0);
    EXPECT_LT(v.back(), 1.0);
}

TEST(Design, WindowedViewIsFlatOutsideWindow) {
    const Grid g = log_grid(1001);
    const Density m = lognormal(g, 0.0, 0.2);
    const std::vector<Likelihood> views{view_windowed(view_vol(m, 0.15), 0.8, 1.25)};
    for (const RiskProfile& risk : {RiskProfile::constant(1.0), RiskProfile::constant(3.0), RiskProfile::affine(1, 1)}) {
        const Design d = design(m, views, risk);
        std::vector<double> left, right;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] < 0.8) left.push_back(d.payoff[i]);
            if (g[i] > 1.25) right.push_back(d.payoff[i]);
        }
        EXPECT_LE(qs::testing::max_relative_spread(left), 1e-8);
        EXPECT_LE(qs::testing::max_relative_spread(right), 1e-8);
    }
}

TEST(ImpliedViews, BondExpressesNoView) {
    const Grid g = log_grid(1001);
    const Density m = lognormal(g, 0.0, 0.2);
    for (const RiskProfile& risk : {RiskProfile::constant(0.5), RiskProfile::constant(3.0), RiskProfile::affine(1, 1)}) {
        EXPECT_LE(sup_norm_diff(implied_views(Payoff::bond(m), risk, m).values(), m.values()), 1e-12);
    }
}

TEST(ImpliedViews, RoundTripThroughDesign) {
    const Grid g = log_grid(2001);
    const Density m = lognormal(g, 0.0, 0.2);
    const std::vector<Likelihood> views{view_vol(m, 0.15), likelihood_between(lognormal(g, 0.03, 0.2), m)};
    for (const RiskProfile& risk :
         {RiskProfile::constant(0.5), RiskProfile::constant(2.0), RiskProfile::affine(1, 1), RiskProfile::affine(0.5, 3)}) {
        const Design d = design(m, views, risk);
        EXPECT_LE(sup_norm_diff(implied_views(d.payoff, risk, m).values(), d.believed.values()), 1e-6) << risk.label();
    }
}

TEST(ImpliedViews, CappedLinearLegacyPayoff) {
    const Grid g = log_grid(1001);
    const Density m = lognormal(g, 0.0, 0.2);
    std::vector<double> fv(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) fv[i] = std::max(std::min(g[i], 1.2), 0.8);
    const Payoff F(m, fv);
    const Density b = implied_views(F, RiskProfile::constant(1.0), m);
    std::vector<double> fm(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) fm[i] = fv[i] * m[i];
    const double z = qs::testing::trapezoid(g.points(), fm);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(b[i], fm[i] / z, 1e-12 * std::max(1.0, b[i]));
    EXPECT_GT(moments(b).mean, moments(m).mean);
}

TEST(ImpliedViews, RejectsZeroPayoff) {
    const Grid g = log_grid(101);
    const Density m = lognormal(g, 0.0, 0.2);
    std::vector<double> fv(g.size(), 1.0);
    fv[10] = 0.0;
    EXPECT_QS_ERROR(implied_views(Payoff(m, fv), RiskProfile::constant(2.0), m), Errc::nonpositive_payoff);
}

TEST(ArrowPratt, KnownProfiles) {
    const RiskProfile c = arrow_pratt_R(crra_utility(3.0));
    EXPECT_TRUE(c.is_constant());
    EXPECT_EQ(c(0.1), 3.0);
    EXPECT_EQ(c(10.0), 3.0);

    const RiskProfile log_r = arrow_pratt_R(log_utility_custom());
    for (double F : {0.01, 0.5, 1.0, 7.0, 300.0}) EXPECT_NEAR(log_r(F), 1.0, 1e-15);

    // Generic derivative ratio, no closed form supplied.
    const double a = 2.0;
    const Utility cara = Utility::custom([a](double F) { return -std::exp(-a * F); },
                                         [a](double F) { return a * std::exp(-a * F); },
                                         [a](double F) { return -a * a * std::exp(-a * F); }, "cara");
    const RiskProfile r = arrow_pratt_R(cara);
    EXPECT_NEAR(r(0.5), 1.0, 1e-14);
    EXPECT_NEAR(r(2.0), 4.0, 1e-14);
    const RiskProfile closed = arrow_pratt_R(exponential_utility(a));
    EXPECT_NEAR(closed(0.5), 1.0, 1e-15);
    EXPECT_NEAR(closed(2.0), 4.0, 1e-15);
}

TEST(ArrowPratt, CrraRoundTrip) {
    for (double R : {0.5, 1.0, 2.0, 5.0}) {
        const RiskProfile p = arrow_pratt_R(crra_utility(R));
        EXPECT_TRUE(p.is_constant());
        EXPECT_EQ(p.constant_value(), R);
    }
}

TEST(ArrowPratt, RejectsNonConcaveUtility) {
    EXPECT_QS_ERROR(Utility::custom([](double F) { return F * F; }, [](double F) { return 2 * F; },
                                    [](double) { return 2.0; }, "convex"),
                    Errc::nonconcave_utility);
}

TEST(CrraUtility, Values) {
    EXPECT_NEAR(crra_utility(1.0).value(std::exp(1.0)), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(crra_utility(2.0).value(2.0), -0.5);
    EXPECT_DOUBLE_EQ(crra_utility(2.0).marginal(2.0), 0.25);
    EXPECT_DOUBLE_EQ(crra_utility(2.0).curvature(2.0), -0.25);
    EXPECT_QS_ERROR(crra_utility(0.0), Errc::nonpositive_R);
}
