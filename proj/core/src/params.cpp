#include "amput/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace amput {

namespace {

constexpr int kValidationSamples = 1001;

double pow_diff(double t0, double t1, int n) {
    return std::pow(t1, n) - std::pow(t0, n);
}

void check_time(const ParamSet& p, double& t) {
    const double tol = 1e-12 * std::max(1.0, p.T);
    if (!(t >= -tol && t <= p.T + tol)) {
        throw std::domain_error("time " + std::to_string(t) + " outside [0, T]");
    }
    t = std::clamp(t, 0.0, p.T);
}

}  // namespace

ParamCurve ParamCurve::constant(double c) {
    ParamCurve pc;
    pc.kind_ = CurveKind::constant;
    pc.c_ = {c};
    return pc;
}

ParamCurve ParamCurve::exp_decay(double a, double b) {
    ParamCurve pc;
    pc.kind_ = CurveKind::exp_decay;
    pc.c_ = {a, b};
    return pc;
}

ParamCurve ParamCurve::linear(double a, double b) {
    ParamCurve pc;
    pc.kind_ = CurveKind::linear;
    pc.c_ = {a, b};
    return pc;
}

ParamCurve ParamCurve::quadratic(double a, double b) {
    ParamCurve pc;
    pc.kind_ = CurveKind::quadratic;
    pc.c_ = {a, b};
    return pc;
}

ParamCurve ParamCurve::tabulated(std::vector<double> t, std::vector<double> v) {
    if (t.empty() || t.size() != v.size()) {
        throw std::invalid_argument("tabulated curve needs matching, non-empty knot and value lists");
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("tabulated curve knots must increase");
    }
    ParamCurve pc;
    pc.kind_ = CurveKind::tabulated;
    pc.t_ = std::move(t);
    pc.c_ = std::move(v);
    return pc;
}

double ParamCurve::value(double t) const {
    switch (kind_) {
    case CurveKind::constant: return c_[0];
    case CurveKind::exp_decay: return c_[0] * std::exp(-c_[1] * t);
    case CurveKind::linear: return c_[0] + c_[1] * t;
    case CurveKind::quadratic: return c_[0] + c_[1] * t * t;
    case CurveKind::tabulated: {
        if (t <= t_.front()) return c_.front();
        if (t >= t_.back()) return c_.back();
        auto it = std::upper_bound(t_.begin(), t_.end(), t);
        std::size_t j = static_cast<std::size_t>(it - t_.begin()) - 1;
        double w = (t - t_[j]) / (t_[j + 1] - t_[j]);
        return c_[j] * (1.0 - w) + c_[j + 1] * w;
    }
    }
    return 0.0;
}

double ParamCurve::deriv(double t) const {
    switch (kind_) {
    case CurveKind::constant: return 0.0;
    case CurveKind::exp_decay: return -c_[1] * c_[0] * std::exp(-c_[1] * t);
    case CurveKind::linear: return c_[1];
    case CurveKind::quadratic: return 2.0 * c_[1] * t;
    case CurveKind::tabulated: {
        double step = 1e-6 * std::max(1.0, std::abs(t));
        return (value(t + step) - value(t - step)) / (2.0 * step);
    }
    }
    return 0.0;
}

double ParamCurve::integral(double t0, double t1) const {
    switch (kind_) {
    case CurveKind::constant: return c_[0] * (t1 - t0);
    case CurveKind::exp_decay:
        if (c_[1] == 0.0) return c_[0] * (t1 - t0);
        return c_[0] / c_[1] * (std::exp(-c_[1] * t0) - std::exp(-c_[1] * t1));
    case CurveKind::linear: return c_[0] * (t1 - t0) + 0.5 * c_[1] * pow_diff(t0, t1, 2);
    case CurveKind::quadratic: return c_[0] * (t1 - t0) + c_[1] / 3.0 * pow_diff(t0, t1, 3);
    case CurveKind::tabulated: break;
    }
    if (t1 < t0) return -integral(t1, t0);
    // Piecewise linear with flat extension: trapezoid is exact on every piece.
    std::vector<double> cuts{t0};
    for (double tk : t_) {
        if (tk > t0 && tk < t1) cuts.push_back(tk);
    }
    cuts.push_back(t1);
    double s = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        s += 0.5 * (value(cuts[i - 1]) + value(cuts[i])) * (cuts[i] - cuts[i - 1]);
    }
    return s;
}

double ParamCurve::integral_sq(double t0, double t1) const {
    switch (kind_) {
    case CurveKind::constant: return c_[0] * c_[0] * (t1 - t0);
    case CurveKind::exp_decay:
        if (c_[1] == 0.0) return c_[0] * c_[0] * (t1 - t0);
        return c_[0] * c_[0] / (2.0 * c_[1]) * (std::exp(-2.0 * c_[1] * t0) - std::exp(-2.0 * c_[1] * t1));
    case CurveKind::linear: {
        double a = c_[0], b = c_[1];
        return a * a * (t1 - t0) + a * b * pow_diff(t0, t1, 2) + b * b / 3.0 * pow_diff(t0, t1, 3);
    }
    case CurveKind::quadratic: {
        double a = c_[0], b = c_[1];
        return a * a * (t1 - t0) + 2.0 * a * b / 3.0 * pow_diff(t0, t1, 3) + b * b / 5.0 * pow_diff(t0, t1, 5);
    }
    case CurveKind::tabulated: break;
    }
    if (t1 < t0) return -integral_sq(t1, t0);
    std::vector<double> cuts{t0};
    for (double tk : t_) {
        if (tk > t0 && tk < t1) cuts.push_back(tk);
    }
    cuts.push_back(t1);
    double s = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        double v0 = value(cuts[i - 1]), v1 = value(cuts[i]);
        s += (v0 * v0 + v0 * v1 + v1 * v1) / 3.0 * (cuts[i] - cuts[i - 1]);
    }
    return s;
}

bool ParamCurve::is_constant() const {
    switch (kind_) {
    case CurveKind::constant: return true;
    case CurveKind::exp_decay: return c_[0] == 0.0 || c_[1] == 0.0;
    case CurveKind::linear:
    case CurveKind::quadratic: return c_[1] == 0.0;
    case CurveKind::tabulated:
        return std::all_of(c_.begin(), c_.end(), [&](double v) { return v == c_.front(); });
    }
    return false;
}

const char* to_string(CurveKind k) {
    switch (k) {
    case CurveKind::constant: return "constant";
    case CurveKind::exp_decay: return "exp_decay";
    case CurveKind::linear: return "linear";
    case CurveKind::quadratic: return "quadratic";
    case CurveKind::tabulated: return "tabulated";
    }
    return "?";
}

CurveKind curve_kind_from_string(const std::string& s) {
    if (s == "constant") return CurveKind::constant;
    if (s == "exp_decay" || s == "exponential") return CurveKind::exp_decay;
    if (s == "linear") return CurveKind::linear;
    if (s == "quadratic") return CurveKind::quadratic;
    if (s == "tabulated") return CurveKind::tabulated;
    throw std::invalid_argument("unknown curve kind '" + s + "'");
}

double ParamSet::k() const {
    return std::log(K / S_star);
}

void ParamSet::validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be positive");
    if (!(K > 0.0) || !std::isfinite(K)) throw std::invalid_argument("K must be positive");
    if (!(S_star > 0.0) || !std::isfinite(S_star)) throw std::invalid_argument("S_star must be positive");
    for (int i = 0; i < kValidationSamples; ++i) {
        double t = T * i / (kValidationSamples - 1);
        double vals[] = {r.value(t), q.value(t), sigma.value(t), lam.value(t), phi.value(t)};
        for (double v : vals) {
            if (!std::isfinite(v)) throw std::invalid_argument("parameter curve is not finite on [0, T]");
        }
        if (!(sigma.value(t) > 0.0)) throw std::invalid_argument("sigma(t) must be positive on [0, T]");
        if (!(lam.value(t) >= 0.0)) throw std::invalid_argument("lambda(t) must be non-negative on [0, T]");
        if (!(phi.value(t) > 0.0)) throw std::invalid_argument("phi(t) must be positive on [0, T]");
        if (kou) {
            if (!(kou->theta1.value(t) > 1.0)) throw std::invalid_argument("theta1(t) must exceed 1");
            if (!(kou->theta2.value(t) > 0.0)) throw std::invalid_argument("theta2(t) must be positive");
            double pp = kou->p.value(t);
            if (!(pp > 0.0 && pp < 1.0)) throw std::invalid_argument("p(t) must lie in (0, 1)");
        }
    }
}

bool ParamSet::no_jump() const {
    if (!phi.is_constant()) return false;
    for (int i = 0; i < kValidationSamples; ++i) {
        if (lam.value(T * i / (kValidationSamples - 1)) != 0.0) return false;
    }
    return true;
}

ParamSet table1_params(double K) {
    ParamSet p;
    p.r = ParamCurve::exp_decay(0.03, 0.01);
    p.q = ParamCurve::constant(0.02);
    p.sigma = ParamCurve::exp_decay(0.5, 0.2);
    p.lam = ParamCurve::linear(0.4, 0.01);
    p.phi = ParamCurve::quadratic(0.2, 0.1);
    p.T = 1.0;
    p.K = K;
    p.S_star = K;
    return p;
}

ParamSet constant_params(double K, double r, double q, double sigma, double lam, double phi, double T) {
    ParamSet p;
    p.r = ParamCurve::constant(r);
    p.q = ParamCurve::constant(q);
    p.sigma = ParamCurve::constant(sigma);
    p.lam = ParamCurve::constant(lam);
    p.phi = ParamCurve::constant(phi);
    p.T = T;
    p.K = K;
    p.S_star = K;
    return p;
}

ExpCoeffs coeffs_exponential(const ParamSet& p, double t) {
    check_time(p, t);
    double r = p.r.value(t), q = p.q.value(t), s = p.sigma.value(t);
    double lam = p.lam.value(t), phi = p.phi.value(t);
    ExpCoeffs c;
    c.a_v = 0.5 * s * s;
    c.a_d = r - q - c.a_v + lam / (1.0 + phi);
    c.a_s = r + lam;
    c.a_j = lam * phi - p.phi.deriv(t);
    return c;
}

KouCoeffs coeffs_kou(const ParamSet& p, double t) {
    if (!p.kou) throw std::invalid_argument("coeffs_kou: parameter set has no Kou curves");
    check_time(p, t);
    const KouCurves& k = *p.kou;
    double t1 = k.theta1.value(t), t2 = k.theta2.value(t), pp = k.p.value(t);
    if (!(t1 > 1.0)) throw std::invalid_argument("coeffs_kou: theta1 must exceed 1");
    double d1 = k.theta1.deriv(t), d2 = k.theta2.deriv(t);
    double lam = p.lam.value(t);
    KouCoeffs c;
    c.mu = pp / (t1 - 1.0) + (1.0 - pp) / (t2 + 1.0);
    c.beta = lam * (pp * t1 - (1.0 - pp) * t2) + d2 - d1;
    c.kappa = lam * t1 * t2 + d1 * t2 + t1 * d2;
    return c;
}

TimeChange::TimeChange(const ParamSet& p) : p_(p) {
    p_.validate();
    analytic_f_ = p_.phi.is_constant();
    tau0_ = tau(0.0);
    const int n = 256;
    t_tab_.resize(n + 1);
    tau_tab_.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        t_tab_[i] = p_.T * i / n;
        tau_tab_[i] = tau(t_tab_[i]);
    }
}

double TimeChange::tau(double t) const {
    check_time(p_, t);
    return 0.5 * p_.sigma.integral_sq(t, p_.T);
}

double TimeChange::int_drift_jump(double t) const {
    if (analytic_f_) return p_.lam.integral(t, p_.T) / (1.0 + p_.phi.value(0.0));
    auto fn = [this](double s) { return p_.lam.value(s) / (1.0 + p_.phi.value(s)); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(fn, t, p_.T, 6, 1e-12);
}

double TimeChange::f(double t) const {
    check_time(p_, t);
    if (t == p_.T) return 0.0;
    return p_.r.integral(t, p_.T) - p_.q.integral(t, p_.T) - 0.5 * p_.sigma.integral_sq(t, p_.T)
           + int_drift_jump(t);
}

double TimeChange::log_h(double t) const {
    check_time(p_, t);
    return -(p_.r.integral(t, p_.T) + p_.lam.integral(t, p_.T));
}

double TimeChange::h(double t) const {
    return std::exp(log_h(t));
}

double TimeChange::t_of_tau(double tau_v) const {
    if (tau_v <= 0.0) return p_.T;
    if (tau_v >= tau0_) return 0.0;
    // tau_tab_ decreases with the index.
    auto it = std::lower_bound(tau_tab_.rbegin(), tau_tab_.rend(), tau_v);
    std::size_t hi_idx = static_cast<std::size_t>(tau_tab_.rend() - it) - 1;
    std::size_t lo_idx = hi_idx + 1 < t_tab_.size() ? hi_idx + 1 : hi_idx;
    double a = t_tab_[hi_idx], b = t_tab_[lo_idx];
    if (a == b) return a;
    auto fn = [&](double t) { return tau(t) - tau_v; };
    double fa = fn(a), fb = fn(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    std::uintmax_t it_max = 200;
    auto r = boost::math::tools::toms748_solve(fn, a, b, fa, fb,
                                               boost::math::tools::eps_tolerance<double>(52), it_max);
    return 0.5 * (r.first + r.second);
}

TimeChange build_time_change(const ParamSet& p) {
    return TimeChange(p);
}

}  // namespace amput
