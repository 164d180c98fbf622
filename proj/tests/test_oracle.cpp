#include <cmath>

#include <gtest/gtest.h>

#include "amput/oracle.hpp"

using namespace amput;

namespace {

constexpr double K = 50.0;

double ncdf(double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); }

// Black-Scholes with continuous yield q.
double bs(double S, double k, double r, double q, double sig, double T, bool call) {
    double sd = sig * std::sqrt(T);
    double d1 = (std::log(S / k) + (r - q + 0.5 * sig * sig) * T) / sd, d2 = d1 - sd;
    if (call) return S * std::exp(-q * T) * ncdf(d1) - k * std::exp(-r * T) * ncdf(d2);
    return k * std::exp(-r * T) * ncdf(-d2) - S * std::exp(-q * T) * ncdf(-d1);
}

ParamSet no_jump() { return constant_params(K, 0.2, 0.1, 0.5, 0.0, 1.0, 1.0); }

TreeConfig tree_cfg(int steps) { return TreeConfig{steps, 0.2, 0.1, 0.5, 1.0, K}; }

FDConfig fd_cfg(int nx, int nt) {
    FDConfig c;
    c.Nx = nx;
    c.Nt = nt;
    return c;
}

const double spots[] = {40.0, 45.0, 50.0, 55.0, 60.0};

}  // namespace

TEST(Tree, BoundaryAtExpiry) {
    TreeResult t = tree_american(tree_cfg(400), OptionType::put);
    EXPECT_EQ(t.times.back(), 1.0);
    // K min(1, r/q) with r > q.
    EXPECT_NEAR(t.boundary.back(), K, 1e-9);
    TreeResult t2 = tree_american(TreeConfig{400, 0.05, 0.1, 0.5, 1.0, K}, OptionType::put);
    EXPECT_NEAR(t2.boundary.back(), 0.5 * K, 1e-9);
}

TEST(Tree, RefinementConverges) {
    TreeResult a = tree_american(tree_cfg(400), OptionType::put);
    TreeResult b = tree_american(tree_cfg(800), OptionType::put);
    for (double S : spots) {
        EXPECT_NEAR(a.price(S), b.price(S), 1e-3 * K) << S;
        EXPECT_GE(a.price(S), std::max(K - S, 0.0));
    }
}

TEST(Tree, CallWithoutDividendsIsEuropean) {
    TreeResult t = tree_american(TreeConfig{800, 0.05, 0.0, 0.3, 1.0, K}, OptionType::call);
    for (double S : spots) EXPECT_NEAR(t.price(S), bs(S, K, 0.05, 0.0, 0.3, 1.0, true), 1e-3 * K) << S;
}

TEST(Tree, RejectsTooFewSteps) {
    EXPECT_THROW(tree_american(tree_cfg(5), OptionType::put), std::invalid_argument);
}

TEST(FD, EuropeanMatchesBlackScholes) {
    FDConfig c = fd_cfg(800, 400);
    c.american = false;
    FDResult r = fd_pide_american(c, no_jump());
    for (double S : spots) EXPECT_NEAR(r.price(S), bs(S, K, 0.2, 0.1, 0.5, 1.0, false), 1e-3 * K) << S;
}

TEST(FD, AgreesWithTreeWithoutJumps) {
    FDResult f = fd_pide_american(fd_cfg(800, 400), no_jump());
    TreeResult t = tree_american(tree_cfg(400), OptionType::put);
    for (double S : spots) {
        EXPECT_NEAR(f.price(S), t.price(S), 2e-3 * K) << S;
        EXPECT_GE(f.price(S), std::max(K - S, 0.0) - 1e-9);
    }
}

TEST(FD, GridDoublingIsStable) {
    ParamSet p = table1_params(60.0);
    FDResult a = fd_pide_american(fd_cfg(400, 200), p);
    FDResult b = fd_pide_american(fd_cfg(800, 400), p);
    EXPECT_NEAR(a.price(60.0), b.price(60.0), 3e-3 * b.price(60.0));
}

TEST(FD, BoundaryRisesTowardExpiry) {
    FDResult f = fd_pide_american(fd_cfg(800, 400), table1_params(60.0));
    EXPECT_EQ(f.times.front(), 1.0);
    double prev = INFINITY;
    for (std::size_t i = 1; i < f.boundary.size(); ++i) {
        ASSERT_TRUE(std::isfinite(f.boundary[i])) << i;
        EXPECT_LE(f.boundary[i], prev + 1e-3 * 60.0) << i;
        prev = f.boundary[i];
    }
    EXPECT_LT(f.boundary_at(0.0), 60.0);
}

TEST(FD, PenaltyResidualIsSmall) {
    FDConfig c = fd_cfg(400, 200);
    FDResult f = fd_pide_american(c, table1_params(60.0));
    EXPECT_LE(f.penalty_residual, 10.0 * 60.0 / c.penalty);
}

TEST(FD, RejectsBadConfig) {
    ParamSet p = no_jump();
    EXPECT_THROW(fd_pide_american(fd_cfg(40, 400), p), std::invalid_argument);
    EXPECT_THROW(fd_pide_american(fd_cfg(400, 10), p), std::invalid_argument);
    FDConfig c = fd_cfg(400, 200);
    c.penalty = 0.0;
    EXPECT_THROW(fd_pide_american(c, p), std::invalid_argument);
    c = fd_cfg(400, 200);
    c.x_lo = 0.5;
    EXPECT_THROW(fd_pide_american(c, p), std::invalid_argument);
}

TEST(FD, KouWithoutJumpsEqualsPlainModel) {
    ParamSet plain = no_jump();
    ParamSet kou = plain;
    kou.kou = KouCurves{ParamCurve::constant(3.0), ParamCurve::constant(2.0), ParamCurve::constant(0.5)};
    FDResult a = fd_pide_american(fd_cfg(400, 200), plain);
    FDResult b = fd_pide_american(fd_cfg(400, 200), kou);
    for (double S : spots) EXPECT_NEAR(a.price(S), b.price(S), 1e-12 * K) << S;
}

TEST(FD, KouJumpsRaiseThePut) {
    ParamSet plain = constant_params(100.0, 0.05, 0.02, 0.3, 0.0, 1.0, 1.0);
    ParamSet kou = constant_params(100.0, 0.05, 0.02, 0.3, 0.5, 1.0, 1.0);
    kou.kou = KouCurves{ParamCurve::constant(10.0), ParamCurve::constant(5.0), ParamCurve::constant(0.4)};
    FDResult a = fd_pide_american(fd_cfg(400, 200), plain);
    FDResult b = fd_pide_american(fd_cfg(400, 200), kou);
    EXPECT_GT(b.price(100.0), a.price(100.0));
}
