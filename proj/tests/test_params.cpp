#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "amput/params.hpp"

using namespace amput;

namespace {

double quad(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

// The table1 curves written out by hand.
double r1(double t) { return 0.03 * std::exp(-0.01 * t); }
double s1(double t) { return 0.5 * std::exp(-0.2 * t); }
double l1(double t) { return 0.4 + 0.01 * t; }
double p1(double t) { return 0.2 + 0.1 * t * t; }

}  // namespace

TEST(ParamCurve, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(ParamCurve::constant(0.3).value(0.7), 0.3);
    EXPECT_DOUBLE_EQ(ParamCurve::exp_decay(0.5, 0.2).value(1.0), 0.5 * std::exp(-0.2));
    EXPECT_DOUBLE_EQ(ParamCurve::linear(0.4, 0.01).value(0.5), 0.405);
    EXPECT_DOUBLE_EQ(ParamCurve::quadratic(0.2, 0.1).value(0.5), 0.225);
    auto tab = ParamCurve::tabulated({0.0, 0.5, 1.0}, {1.0, 2.0, 0.0});
    EXPECT_DOUBLE_EQ(tab.value(0.25), 1.5);
    EXPECT_DOUBLE_EQ(tab.value(0.75), 1.0);
    EXPECT_DOUBLE_EQ(tab.value(2.0), 0.0);
}

TEST(ParamCurve, IntegralsMatchQuadrature) {
    std::vector<ParamCurve> cs = {ParamCurve::constant(0.3), ParamCurve::exp_decay(0.5, 0.2),
                                  ParamCurve::linear(0.4, 0.01), ParamCurve::quadratic(0.2, 0.1),
                                  ParamCurve::tabulated({0.0, 0.3, 1.0}, {0.1, 0.4, 0.2})};
    for (const auto& c : cs) {
        for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{0.2, 0.9}, std::pair{0.45, 0.55}}) {
            auto v = [&](double t) { return c.value(t); };
            auto v2 = [&](double t) { return c.value(t) * c.value(t); };
            double q1 = c.kind() == CurveKind::tabulated ? quad(v, a, 0.3) * (a < 0.3) + quad(v, std::max(a, 0.3), b)
                                                          : quad(v, a, b);
            double q2 = c.kind() == CurveKind::tabulated ? quad(v2, a, 0.3) * (a < 0.3) + quad(v2, std::max(a, 0.3), b)
                                                          : quad(v2, a, b);
            EXPECT_NEAR(c.integral(a, b), q1, 1e-13) << to_string(c.kind());
            EXPECT_NEAR(c.integral_sq(a, b), q2, 1e-13) << to_string(c.kind());
        }
    }
}

TEST(ParamCurve, Derivatives) {
    EXPECT_DOUBLE_EQ(ParamCurve::quadratic(0.2, 0.1).deriv(0.0), 0.0);
    EXPECT_DOUBLE_EQ(ParamCurve::quadratic(0.2, 0.1).deriv(0.5), 0.1);
    EXPECT_NEAR(ParamCurve::exp_decay(0.5, 0.2).deriv(0.3), -0.1 * std::exp(-0.06), 1e-15);
    auto tab = ParamCurve::tabulated({0.0, 1.0}, {1.0, 3.0});
    EXPECT_NEAR(tab.deriv(0.4), 2.0, 1e-8);
}

TEST(ParamCurve, KindNamesRoundTrip) {
    for (auto k : {CurveKind::constant, CurveKind::exp_decay, CurveKind::linear, CurveKind::quadratic,
                   CurveKind::tabulated}) {
        EXPECT_EQ(curve_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(curve_kind_from_string("cubic"), std::invalid_argument);
    EXPECT_THROW(ParamCurve::tabulated({0.0, 0.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST(ParamSet, ValidationRejectsBadCurves) {
    ParamSet p = table1_params(60.0);
    EXPECT_NO_THROW(p.validate());
    ParamSet bad = p;
    bad.sigma = ParamCurve::linear(0.1, -0.2);  // crosses zero at t = 0.5
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = p;
    bad.lam = ParamCurve::constant(-0.1);
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = p;
    bad.phi = ParamCurve::constant(0.0);
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = p;
    bad.K = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = p;
    bad.kou = KouCurves{ParamCurve::constant(1.0), ParamCurve::constant(2.0), ParamCurve::constant(0.5)};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    EXPECT_DOUBLE_EQ(p.k(), 0.0);
}

TEST(Coefficients, Table1AtExpiryStart) {
    ParamSet p = table1_params(60.0);
    ExpCoeffs c = coeffs_exponential(p, 0.0);
    EXPECT_NEAR(c.a_v, 0.125, 1e-15);
    EXPECT_NEAR(c.a_s, 0.43, 1e-15);
    EXPECT_NEAR(c.a_j, 0.08, 1e-15);
    EXPECT_NEAR(c.a_d, 0.03 - 0.02 - 0.125 + 0.4 / 1.2, 1e-15);
}

TEST(Coefficients, Table1MidTermFromFormulas) {
    ParamSet p = table1_params(60.0);
    const double t = 0.5;
    ExpCoeffs c = coeffs_exponential(p, t);
    double sig = s1(t), lam = l1(t), phi = p1(t), dphi = 0.2 * t;
    EXPECT_NEAR(c.a_v, 0.5 * sig * sig, 1e-15);
    EXPECT_NEAR(c.a_d, r1(t) - 0.02 - 0.5 * sig * sig + lam / (1.0 + phi), 1e-15);
    EXPECT_NEAR(c.a_s, r1(t) + lam, 1e-15);
    EXPECT_NEAR(c.a_j, lam * phi - dphi, 1e-15);
}

TEST(Coefficients, NoJumpHasZeroCoupling) {
    ParamSet p = constant_params(50.0, 0.2, 0.1, 0.5, 0.0, 1.0, 1.0);
    EXPECT_EQ(coeffs_exponential(p, 0.3).a_j, 0.0);
    EXPECT_TRUE(p.no_jump());
    EXPECT_FALSE(table1_params(60.0).no_jump());
}

TEST(Coefficients, OutOfRangeTime) {
    ParamSet p = table1_params(60.0);
    EXPECT_THROW(coeffs_exponential(p, 1.5), std::domain_error);
    EXPECT_THROW(coeffs_exponential(p, -0.1), std::domain_error);
}

TEST(Coefficients, KouHandArithmetic) {
    ParamSet p = constant_params(1.0, 0.05, 0.0, 0.3, 1.0, 1.0, 1.0);
    p.kou = KouCurves{ParamCurve::constant(3.0), ParamCurve::constant(2.0), ParamCurve::constant(0.5)};
    KouCoeffs k = coeffs_kou(p, 0.2);
    EXPECT_NEAR(k.mu, 5.0 / 12.0, 1e-15);
    EXPECT_NEAR(k.beta, 0.5, 1e-15);
    EXPECT_NEAR(k.kappa, 6.0, 1e-15);

    p.lam = ParamCurve::constant(0.0);
    k = coeffs_kou(p, 0.2);
    EXPECT_EQ(k.beta, 0.0);
    EXPECT_EQ(k.kappa, 0.0);
}

TEST(Coefficients, KouTimeDependentTheta) {
    ParamSet p = constant_params(1.0, 0.05, 0.0, 0.3, 0.7, 1.0, 1.0);
    p.kou = KouCurves{ParamCurve::linear(3.0, 1.0), ParamCurve::constant(2.0), ParamCurve::constant(0.3)};
    const double t = 0.4, th1 = 3.4, th2 = 2.0, pp = 0.3, lam = 0.7;
    KouCoeffs k = coeffs_kou(p, t);
    EXPECT_NEAR(k.beta, lam * (pp * th1 - (1.0 - pp) * th2) + 0.0 - 1.0, 1e-14);
    EXPECT_NEAR(k.kappa, lam * th1 * th2 + 1.0 * th2, 1e-14);
    EXPECT_NEAR(k.mu, pp / (th1 - 1.0) + (1.0 - pp) / (th2 + 1.0), 1e-15);

    ParamSet no_kou = table1_params(60.0);
    EXPECT_THROW(coeffs_kou(no_kou, 0.0), std::invalid_argument);
}

TEST(TimeChange, TerminalValues) {
    for (const ParamSet& p : {table1_params(60.0), constant_params(50.0, 0.2, 0.1, 0.5, 0.3, 1.5, 2.0)}) {
        TimeChange tc = build_time_change(p);
        EXPECT_EQ(tc.tau(p.T), 0.0);
        EXPECT_EQ(tc.f(p.T), 0.0);
        EXPECT_EQ(tc.h(p.T), 1.0);
    }
}

TEST(TimeChange, ConstantVolatility) {
    TimeChange tc = build_time_change(constant_params(50.0, 0.2, 0.1, 0.5, 0.3, 1.5, 1.0));
    EXPECT_NEAR(tc.tau(0.0), 0.125, 1e-15);
    EXPECT_TRUE(tc.analytic());
}

TEST(TimeChange, Table1AgainstQuadrature) {
    ParamSet p = table1_params(60.0);
    TimeChange tc = build_time_change(p);
    for (double t : {0.0, 0.25, 0.6}) {
        double tau = quad([](double s) { return 0.5 * s1(s) * s1(s); }, t, 1.0);
        double f = quad([](double s) { return r1(s) - 0.02 - 0.5 * s1(s) * s1(s) + l1(s) / (1.0 + p1(s)); }, t, 1.0);
        double lh = -quad([](double s) { return r1(s) + l1(s); }, t, 1.0);
        EXPECT_NEAR(tc.tau(t), tau, 1e-13);
        EXPECT_NEAR(tc.f(t), f, 1e-12);
        EXPECT_NEAR(tc.log_h(t), lh, 1e-13);
    }
}

TEST(TimeChange, MonotoneAndInvertible) {
    ParamSet p = table1_params(60.0);
    TimeChange tc = build_time_change(p);
    double prev = tc.tau(0.0);
    EXPECT_DOUBLE_EQ(prev, tc.tau_max());
    for (int i = 1; i <= 100; ++i) {
        double t = i / 100.0;
        double v = tc.tau(t);
        EXPECT_LT(v, prev);
        prev = v;
    }
    for (int i = 0; i <= 100; ++i) {
        double t = i / 100.0;
        EXPECT_NEAR(tc.t_of_tau(tc.tau(t)), t, 1e-12);
    }
}
