#include "amput/greens.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "amput/special.hpp"

namespace amput {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrtPi = 0.56418958354775628695;

// log erfc(w), any sign.
double log_erfc(double w) {
    if (w >= 0.0) return -w * w + std::log(erfcx(w));
    return std::log(std::erfc(w));
}

// Running sum of signed terms held in log form.
struct LogSum {
    std::vector<LogVal> terms;
    void add(LogVal v) {
        if (v.sign != 0.0) terms.push_back(v);
    }
    void add(double sign, double log_abs) { add(LogVal{sign, log_abs}); }
    KernelEval eval() const {
        if (terms.empty()) return {};
        double mx = terms.front().log_abs;
        for (const auto& t : terms) mx = std::max(mx, t.log_abs);
        double v = 0.0;
        for (const auto& t : terms) v += t.sign * std::exp(t.log_abs - mx);
        if (mx <= 700.0) return {v * std::exp(mx), 0.0};
        return {v, mx};
    }
};

LogVal scaled(LogVal v, double sign, double log_factor) {
    if (v.sign == 0.0) return v;
    return {v.sign * sign, v.log_abs + log_factor};
}

// int_{lo}^{hi} e^{p eta} erfc(alpha + beta eta) d eta, accumulated in log form with prefactor
// sign * e^{log_pre}.
void add_exp_erfc_integral(LogSum& acc, double sign, double log_pre, double p, double alpha,
                           double beta, double lo, double hi) {
    double wl = alpha + beta * lo, wh = alpha + beta * hi;
    if (std::abs(p) < 1e-10) {
        // (1/beta) [w erfc(w) - e^{-w^2}/sqrt(pi)]
        auto F = [](double w) { return w * std::erfc(w) - std::exp(-w * w) * kInvSqrtPi; };
        double v = (F(wh) - F(wl)) / beta;
        if (v != 0.0) acc.add(sign * (v > 0.0 ? 1.0 : -1.0), log_pre + std::log(std::abs(v)));
        return;
    }
    double sp = p > 0.0 ? 1.0 : -1.0;
    double lp = -std::log(std::abs(p));
    acc.add(sign * sp, log_pre + lp + p * hi + log_erfc(wh));
    acc.add(-sign * sp, log_pre + lp + p * lo + log_erfc(wl));
    double C = p * p / (4.0 * beta * beta) - alpha * p / beta;
    double sh = p / (2.0 * beta);
    acc.add(scaled(log_exp_erf_diff(C, wh - sh, wl - sh), sign * sp, log_pre + lp));
}

struct K1Parts {
    double c1, c2, D, sq;
};

K1Parts k1_parts(const K1Args& a) {
    if (!(a.dtau > 0.0)) throw std::domain_error("K1: requires s < tau");
    K1Parts r{};
    r.c1 = a.xi + a.f_s - a.f_tau;
    r.c2 = 2.0 * a.x_B + a.f_tau - a.xi - a.f_s;
    r.D = a.dtau;
    r.sq = 2.0 * std::sqrt(a.dtau);
    return r;
}

// e^{phi c + phi^2 D} A(c) in log form.
LogVal exp_A(double phi, double c, double D, double sq, double x, double x_B) {
    double E = phi * c + phi * phi * D;
    return log_exp_erf_diff(E, (x - c - 2.0 * phi * D) / sq, (x_B - c - 2.0 * phi * D) / sq);
}

double D_term(double phi, double c, double D, double sq, double x, double x_B) {
    double E = phi * c + phi * phi * D;
    double v = phi * exp_erf_diff(E, (x - c - 2.0 * phi * D) / sq, (x_B - c - 2.0 * phi * D) / sq);
    double g = std::exp(phi * x - (x - c) * (x - c) / (4.0 * D)) -
               std::exp(phi * x_B - (x_B - c) * (x_B - c) / (4.0 * D));
    return v - g / std::sqrt(kPi * D);
}

}  // namespace

Model::Model(ParamSet p, bool memoize) : p_(std::move(p)), tc_(p_), memoize_(memoize) {
    p_.validate();
    k_ = p_.k();
}

TimePoint Model::make(double tau, double t) const {
    TimePoint tp;
    tp.tau = tau;
    tp.t = t;
    tp.f = tc_.f(t);
    tp.h = tc_.h(t);
    tp.r = p_.r.value(t);
    tp.q = p_.q.value(t);
    tp.lam = p_.lam.value(t);
    tp.phi = p_.phi.value(t);
    tp.dphi = p_.phi.deriv(t);
    tp.c = coeffs_exponential(p_, t);
    return tp;
}

TimePoint Model::at_tau_uncached(double tau) const {
    return make(tau, tc_.t_of_tau(tau));
}

TimePoint Model::at_tau(double tau) const {
    if (!memoize_) return at_tau_uncached(tau);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = memo_.find(tau);
        if (it != memo_.end()) return it->second;
    }
    TimePoint tp = at_tau_uncached(tau);
    std::lock_guard<std::mutex> lk(mu_);
    memo_.emplace(tau, tp);
    return tp;
}

TimePoint Model::at_t(double t) const {
    return make(tc_.tau(t), t);
}

double PriceSlice::price(double xv) const {
    if (x.empty()) return 0.0;
    xv = std::max(xv, x.front());
    double qv;
    if (xv >= x.back()) {
        qv = q.back();
    } else {
        auto it = std::upper_bound(x.begin(), x.end(), xv);
        std::size_t j = static_cast<std::size_t>(it - x.begin()) - 1;
        double th = (xv - x[j]) / (x[j + 1] - x[j]);
        qv = q[j] * (1.0 - th) + q[j + 1] * th;
    }
    return std::exp(-phi * xv) * qv;
}

void PriceSlice::build_quadrature(int refine) {
    xr.clear();
    wp.clear();
    if (x.size() < 2) return;
    refine = std::max(refine, 1);
    std::vector<double> qr;
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
        for (int m = 0; m < refine; ++m) {
            double th = static_cast<double>(m) / refine;
            xr.push_back(x[j] * (1.0 - th) + x[j + 1] * th);
            qr.push_back(q[j] * (1.0 - th) + q[j + 1] * th);
        }
    }
    xr.push_back(x.back());
    qr.push_back(q.back());
    wp.assign(xr.size(), 0.0);
    for (std::size_t j = 0; j + 1 < xr.size(); ++j) {
        double h = 0.5 * (xr[j + 1] - xr[j]);
        wp[j] += h;
        wp[j + 1] += h;
    }
    for (std::size_t j = 0; j < xr.size(); ++j) wp[j] *= std::exp(-phi * xr[j]) * qr[j];
}

double KernelEval::get() const {
    return log_scale == 0.0 ? value : value * std::exp(log_scale);
}

double g_value(const Model& m, const TimePoint& tp, double x_B) {
    return m.S_star() / tp.h * (tp.phi * std::exp(m.k()) - (1.0 + tp.phi) * std::exp(x_B));
}

double psi(const Model& m, const BoundaryState& bs, std::size_t i) {
    if (i >= bs.committed()) throw std::out_of_range("psi: node not committed");
    TimePoint tp = m.at_tau(bs.tau[i]);
    return (bs.Pxx[i] - m.S_star() * tp.phi * std::exp(bs.x_B[i])) / tp.h;
}

double pxx_boundary_relation(const Model& m, const TimePoint& tp, double x_B) {
    return m.S_star() * (tp.r * std::exp(m.k()) - (tp.q + tp.c.a_v) * std::exp(x_B)) / tp.c.a_v;
}

KernelEval K1_closed(const K1Args& a) {
    K1Parts k = k1_parts(a);
    if (a.x == a.x_B) return {};
    LogVal t1 = exp_A(a.phi, k.c1, k.D, k.sq, a.x, a.x_B);
    LogVal t2 = exp_A(a.phi, k.c2, k.D, k.sq, a.x, a.x_B);
    KernelEval r;
    log_sub(t1, t2, r.value, r.log_scale);
    if (r.log_scale == 0.0) r.value *= 0.5;
    else r.log_scale += std::log(0.5);
    return r;
}

double K1_closed_fast(const K1Args& a) {
    K1Parts k = k1_parts(a);
    auto term = [&](double c) {
        double E = a.phi * c + a.phi * a.phi * k.D;
        return exp_erf_diff(E, (a.x - c - 2.0 * a.phi * k.D) / k.sq,
                            (a.x_B - c - 2.0 * a.phi * k.D) / k.sq);
    };
    return 0.5 * (term(k.c1) - term(k.c2));
}

double dK1_dxi(const K1Args& a) {
    K1Parts k = k1_parts(a);
    return 0.5 * (D_term(a.phi, k.c1, k.D, k.sq, a.x, a.x_B) +
                  D_term(a.phi, k.c2, k.D, k.sq, a.x, a.x_B));
}

double dK1_dx(const K1Args& a) {
    K1Parts k = k1_parts(a);
    auto gam = [&](double u) { return std::exp(-u * u / (4.0 * k.D)) / (2.0 * std::sqrt(kPi * k.D)); };
    return std::exp(a.phi * a.x) * (gam(a.x - k.c1) - gam(a.x - k.c2));
}

double K1_at_s_equals_tau(double phi, double x, double xi, double x_B) {
    if (xi < x_B) throw std::domain_error("K1_at_s_equals_tau: xi below boundary");
    if (x < xi) return 0.0;
    if (x == xi) return 0.5 * std::exp(phi * xi);
    return std::exp(phi * xi);
}

IValues I_integrals(const IArgs& a) {
    IValues out{0.0, 0.0, 0.0};
    const double Y = a.x_B + a.f_tau;

    if (a.tau > 0.0) {
        // Inner w-integrals are e^{m + tau} sqrt(pi tau) erfc((k - m - 2 tau)/(2 sqrt tau)) with
        // m = eta + f (direct) and m = 2Y - eta - f (image).
        double st = std::sqrt(a.tau);
        double lpre = 0.5 * std::log(kPi * a.tau) + a.tau;
        LogSum acc;
        add_exp_erfc_integral(acc, 1.0, lpre + a.f_tau, a.phi + 1.0, (a.k - a.f_tau - 2.0 * a.tau) / (2.0 * st),
                              -1.0 / (2.0 * st), a.x_B, a.x);
        add_exp_erfc_integral(acc, -1.0, lpre + 2.0 * Y - a.f_tau, a.phi - 1.0,
                              (a.k - 2.0 * Y + a.f_tau - 2.0 * a.tau) / (2.0 * st), 1.0 / (2.0 * st), a.x_B, a.x);
        out.I1 = acc.eval().get();
    }

    if (a.D > 0.0) {
        double D = a.D;
        double sq = 2.0 * std::sqrt(D);
        double ca = a.y_s - a.f_tau;
        double cb = 2.0 * a.x_B + a.f_tau - a.y_s;
        double ea = exp_erf_diff(a.phi * ca + a.phi * a.phi * D, (a.x - ca - 2.0 * a.phi * D) / sq,
                                 (a.x_B - ca - 2.0 * a.phi * D) / sq);
        double eb = exp_erf_diff(a.phi * cb + a.phi * a.phi * D, (a.x - cb - 2.0 * a.phi * D) / sq,
                                 (a.x_B - cb - 2.0 * a.phi * D) / sq);
        double rp = std::sqrt(kPi * D);
        out.I2 = rp * (ea - eb);
        auto gs = [&](double e) {
            return std::exp(a.phi * e) * (std::exp(-(e - ca) * (e - ca) / (4.0 * D)) +
                                          std::exp(-(e - cb) * (e - cb) / (4.0 * D)));
        };
        out.I3 = 2.0 * D * (a.phi * rp * (ea + eb) - (gs(a.x) - gs(a.x_B)));
    }
    return out;
}

double gamma_integral_closed(double S_star, double f_tau, double tau, double z, double y_tau, double k) {
    if (!(tau > 0.0)) throw std::domain_error("gamma_integral_closed: tau must be positive");
    double s = 2.0 * std::sqrt(tau);
    double a = (k - z) / s, b = (k + z - 2.0 * y_tau) / s;
    // erf(a) - erf(b) on the tail side to avoid cancellation.
    double d = a + b >= 0.0 ? std::erfc(b) - std::erfc(a) : std::erfc(-a) - std::erfc(-b);
    return 0.5 * S_star * std::exp(-f_tau) * d;
}

}  // namespace amput
