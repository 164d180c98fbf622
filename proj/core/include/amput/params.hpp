#pragma once

#include <optional>
#include <string>
#include <vector>

namespace amput {

enum class CurveKind { constant, exp_decay, linear, quadratic, tabulated };

// A model parameter as a function of calendar time t in [0, T].
//   constant   c0
//   exp_decay  c0 * exp(-c1 t)
//   linear     c0 + c1 t
//   quadratic  c0 + c1 t^2
//   tabulated  piecewise linear through (t_i, v_i), flat outside
class ParamCurve {
public:
    ParamCurve() = default;

    static ParamCurve constant(double c);
    static ParamCurve exp_decay(double a, double b);
    static ParamCurve linear(double a, double b);
    static ParamCurve quadratic(double a, double b);
    static ParamCurve tabulated(std::vector<double> t, std::vector<double> v);

    double value(double t) const;
    double deriv(double t) const;
    // Exact integrals of v and v^2 over [t0, t1].
    double integral(double t0, double t1) const;
    double integral_sq(double t0, double t1) const;

    bool is_constant() const;
    CurveKind kind() const { return kind_; }
    const std::vector<double>& coeffs() const { return c_; }
    const std::vector<double>& knots() const { return t_; }

private:
    CurveKind kind_ = CurveKind::constant;
    std::vector<double> c_{0.0};
    std::vector<double> t_;
};

const char* to_string(CurveKind k);
CurveKind curve_kind_from_string(const std::string& s);

struct KouCurves {
    ParamCurve theta1;
    ParamCurve theta2;
    ParamCurve p;
};

struct ParamSet {
    ParamCurve r;
    ParamCurve q;
    ParamCurve sigma;
    ParamCurve lam;
    ParamCurve phi;
    std::optional<KouCurves> kou;
    double T = 1.0;
    double K = 1.0;
    double S_star = 1.0;

    double k() const;
    // Throws std::invalid_argument on a violated invariant (curves sampled at 1001 points).
    void validate() const;
    // lambda identically zero and phi constant.
    bool no_jump() const;
};

// The test set of the reference experiment: r = 0.03 e^{-0.01 t}, q = 0.02,
// sigma = 0.5 e^{-0.2 t}, lambda = 0.4 + 0.01 t, phi = 0.2 + 0.1 t^2, T = 1, S_* = K.
ParamSet table1_params(double K);

// Constant-coefficient set; phi is carried even when lam = 0.
ParamSet constant_params(double K, double r, double q, double sigma, double lam, double phi, double T);

struct ExpCoeffs {
    double a_d;
    double a_v;
    double a_s;
    double a_j;
};

struct KouCoeffs {
    double mu;
    double beta;
    double kappa;
};

ExpCoeffs coeffs_exponential(const ParamSet& p, double t);
KouCoeffs coeffs_kou(const ParamSet& p, double t);

// tau(t) = int_t^T a_v, f(t) = int_t^T a_d, h(t) = exp(-int_t^T a_s).
// With z = x + f the continuation problem for u = phi P + P_x becomes a heat equation in (tau, z).
class TimeChange {
public:
    explicit TimeChange(const ParamSet& p);

    double tau(double t) const;
    double f(double t) const;
    double h(double t) const;
    double log_h(double t) const;
    double t_of_tau(double tau) const;
    double tau_max() const { return tau0_; }
    // True when f has a closed-form antiderivative (tau and h always do).
    bool analytic() const { return analytic_f_; }

private:
    double int_drift_jump(double t) const;

    ParamSet p_;
    bool analytic_f_ = true;
    double tau0_ = 0.0;
    std::vector<double> t_tab_;
    std::vector<double> tau_tab_;
};

TimeChange build_time_change(const ParamSet& p);

}  // namespace amput
