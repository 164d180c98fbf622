#include "engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>


#include "amput/special.hpp"

namespace amput::detail {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.77245385090551602730;
constexpr int kLayerPoints = 16;
constexpr double kGridCurvature = 4.0;

// Node times 0..n-1 from the state, then the endpoint.
std::vector<double> node_times(const BoundaryState& bs, std::size_t n, double tau_e) {
    std::vector<double> T(bs.tau.begin(), bs.tau.begin() + static_cast<std::ptrdiff_t>(n));
    T.push_back(tau_e);
    return T;
}

std::vector<double> trapezoid_weights(const std::vector<double>& T) {
    std::vector<double> tw(T.size(), 0.0);
    for (std::size_t j = 0; j + 1 < T.size(); ++j) {
        double h = 0.5 * (T[j + 1] - T[j]);
        tw[j] += h;
        tw[j + 1] += h;
    }
    return tw;
}

}  // namespace

SRule s_rule(const std::vector<double>& taus, std::size_t n, double tau_e) {
    const GaussRule& gr = gauss_legendre(kLayerPoints);
    SRule r;
    std::vector<double> T(taus.begin(), taus.begin() + static_cast<std::ptrdiff_t>(n));
    T.push_back(tau_e);
    enum Kind { plain, lo, hi };
    auto add = [&](double a, double b, Kind kind) {
        double L = b - a;
        for (std::size_t q = 0; q < gr.x.size(); ++q) {
            double u = 0.5 * (gr.x[q] + 1.0), wu = 0.5 * gr.w[q];
            if (kind == lo) {
                r.s.push_back(a + L * u * u);
                r.w.push_back(wu * 2.0 * L * u);
            } else if (kind == hi) {
                r.s.push_back(b - L * (1.0 - u) * (1.0 - u));
                r.w.push_back(wu * 2.0 * L * (1.0 - u));
            } else {
                r.s.push_back(a + L * u);
                r.w.push_back(wu * L);
            }
        }
    };
    for (std::size_t j = 0; j < n; ++j) {
        double a = T[j], b = T[j + 1];
        if (j == 0 && n == 1) {
            double mid = 0.5 * (a + b);
            add(a, mid, lo);
            add(mid, b, hi);
        } else if (j == 0) {
            add(a, b, lo);
        } else if (j + 1 == n) {
            add(a, b, hi);
        } else {
            add(a, b, plain);
        }
    }
    return r;
}

Layer layer_at(const Model& m, const BoundaryState& bs, std::size_t n, const Endpoint& e, double s,
               const TimePoint& tp) {
    Layer L;
    L.s = s;
    L.tp = tp;
    std::size_t j = 0;
    while (j + 1 < n && s >= bs.tau[j + 1]) ++j;
    double ta = bs.tau[j];
    double tb = j + 1 < n ? bs.tau[j + 1] : e.tau;
    double ya = j == 0 ? m.k() : bs.y[j];
    double yb = j + 1 < n ? bs.y[j + 1] : e.y;
    bool last = j + 1 == n;
    double pa = bs.psi[j];
    double pb = last ? 0.0 : bs.psi[j + 1];
    if (j == 0) {
        double rr = std::sqrt(s / tb);
        L.y = ya + (yb - ya) * rr;
        L.yp = s > 0.0 ? (yb - ya) / (2.0 * std::sqrt(s * tb)) : 0.0;
        L.psi_hist = pa + (pb - pa) * rr;
        L.shape_e = last ? rr : 0.0;
    } else {
        double th = (s - ta) / (tb - ta);
        L.y = ya * (1.0 - th) + yb * th;
        L.yp = (yb - ya) / (tb - ta);
        L.psi_hist = pa * (1.0 - th) + pb * th;
        L.shape_e = last ? th : 0.0;
    }
    L.x_B = L.y - tp.f;
    L.g = g_value(m, tp, L.x_B);
    const ExpCoeffs& c = tp.c;
    double eB = std::exp(L.x_B), ek = std::exp(m.k());
    L.gp = (c.a_s / c.a_v) * L.g +
           m.S_star() / tp.h *
               (-(tp.dphi / c.a_v) * (ek - eB) - (1.0 + tp.phi) * eB * (L.yp - c.a_d / c.a_v));
    return L;
}

std::vector<Layer> build_layers(const Model& m, const BoundaryState& bs, std::size_t n, const Endpoint& e) {
    SRule r = s_rule(bs.tau, n, e.tau);
    std::vector<Layer> out;
    out.reserve(r.s.size());
    for (std::size_t q = 0; q < r.s.size(); ++q) {
        Layer L = layer_at(m, bs, n, e, r.s[q], m.at_tau(r.s[q]));
        L.w = r.w[q];
        out.push_back(L);
    }
    return out;
}

Endpoint make_endpoint(const Model& m, double tau, double x_B, double psi_v) {
    Endpoint e;
    e.tau = tau;
    e.tp = m.at_tau(tau);
    e.x_B = x_B;
    e.y = x_B + e.tp.f;
    e.psi = psi_v;
    return e;
}

Endpoint node_endpoint(const Model& m, const BoundaryState& bs, std::size_t i) {
    if (i == 0 || i >= bs.committed()) throw std::out_of_range("node_endpoint: bad node index");
    return make_endpoint(m, bs.tau[i], bs.x_B[i], bs.psi[i]);
}

Endpoint interp_endpoint(const Model& m, const BoundaryState& bs, double tau, std::size_t& n) {
    std::size_t N = bs.committed();
    if (N < 2 || !(tau > 0.0) || tau > bs.tau[N - 1] * (1.0 + 1e-14)) {
        throw std::domain_error("tau outside the solved range");
    }
    tau = std::min(tau, bs.tau[N - 1]);
    for (std::size_t i = 1; i < N; ++i) {
        if (tau == bs.tau[i]) {
            n = i;
            return node_endpoint(m, bs, i);
        }
    }
    std::size_t j = 0;
    while (tau > bs.tau[j + 1]) ++j;
    n = j + 1;
    double ta = bs.tau[j], tb = bs.tau[j + 1];
    double ya = j == 0 ? m.k() : bs.y[j], yb = bs.y[j + 1];
    double pa = bs.psi[j], pb = bs.psi[j + 1];
    double th = j == 0 ? std::sqrt(tau / tb) : (tau - ta) / (tb - ta);
    TimePoint tp = m.at_tau(tau);
    double y = ya + (yb - ya) * th;
    return make_endpoint(m, tau, y - tp.f, pa + (pb - pa) * th);
}

double jz_term(const Model& m, const BoundaryState& bs, std::size_t n, const Endpoint& e) {
    std::vector<double> T = node_times(bs, n, e.tau);
    std::vector<double> mv(n + 1, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        const PriceSlice& sl = bs.slices[j];
        TimePoint tp = m.at_tau(T[j]);
        double D = e.tau - T[j];
        double coef = tp.aj_tilde() / tp.h / (2.0 * kSqrtPi * D * std::sqrt(D));
        double inner = 0.0;
        for (std::size_t q = 0; q < sl.xr.size(); ++q) {
            double u = sl.xr[q] + tp.f - e.y;
            inner += sl.wp[q] * u * std::exp(-u * u / (4.0 * D));
        }
        mv[j] = coef * inner * std::sqrt(D);
    }
    mv[n] = e.tp.aj_tilde() / e.tp.h * m.S_star() * (std::exp(m.k()) - std::exp(e.x_B)) / kSqrtPi;
    // Product integration of the piecewise-linear m against 1/sqrt(tau - s).
    double tot = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double a = T[j], b = T[j + 1];
        double ua = e.tau - a, ub = e.tau - b;
        double I0 = 2.0 * (std::sqrt(ua) - std::sqrt(ub));
        double I1 = (2.0 / 3.0) * (ua * std::sqrt(ua) - ub * std::sqrt(ub));
        tot += (mv[j] * (I1 - ub * I0) + mv[j + 1] * (ua * I0 - I1)) / (b - a);
    }
    return tot;
}

NeumannParts neumann_parts(const Model& m, const BoundaryState& bs, std::size_t n, const Endpoint& e,
                           const std::vector<Layer>& layers) {
    NeumannParts out;
    for (const Layer& L : layers) {
        double D = e.tau - L.s;
        double d = e.y - L.y;
        double E = std::exp(-d * d / (4.0 * D));
        double KD = d * E / (2.0 * kSqrtPi * D * std::sqrt(D));
        double Gm = E / (2.0 * std::sqrt(kPi * D));
        out.R0 += L.w * (L.psi_hist * KD - 2.0 * L.gp * Gm);
        out.We += L.w * L.shape_e * KD;
    }
    double g0 = g_value(m, m.at_tau(0.0), m.k());
    double d0 = e.y - m.k();
    out.R0 += -2.0 * g0 * std::exp(-d0 * d0 / (4.0 * e.tau)) / (2.0 * std::sqrt(kPi * e.tau));
    out.jz = jz_term(m, bs, n, e);
    out.R0 += out.jz;
    return out;
}

ThetaEval::ThetaEval(const Model& m, const BoundaryState& bs, std::size_t n, const Endpoint& e) : e_(e) {
    const double phi = e.tp.phi;
    const double fe = e.tp.f;
    const double xB = e.x_B;
    base_ = m.S_star() * (std::exp(m.k()) - std::exp(xB)) * std::exp(phi * xB);

    std::vector<Layer> layers = build_layers(m, bs, n, e);
    const double s_last = n == 1 ? 0.5 * e.tau : bs.tau[n - 1];
    delta_ = e.tau - s_last;
    lk_.reserve(layers.size());
    for (const Layer& L : layers) {
        if (L.s >= s_last) last_.push_back(lk_.size());
        LayerK k{};
        k.w = L.w;
        k.g = L.g;
        k.mu = L.psi(e.psi) + L.yp * L.g;
        k.a = L.y - fe;
        k.b = 2.0 * xB + fe - L.y;
        k.D = e.tau - L.s;
        k.sq = 2.0 * std::sqrt(k.D);
        k.Ea = phi * k.a + phi * phi * k.D;
        k.Eb = phi * k.b + phi * phi * k.D;
        k.lo_a = (xB - k.a - 2.0 * phi * k.D) / k.sq;
        k.lo_b = (xB - k.b - 2.0 * phi * k.D) / k.sq;
        double d = e.y - L.y;
        k.Gd = std::exp(phi * xB - d * d / (4.0 * k.D)) / std::sqrt(kPi * k.D);
        lk_.push_back(k);
    }

    std::vector<double> T = node_times(bs, n, e.tau);
    std::vector<double> tw = trapezoid_weights(T);
    for (std::size_t j = 1; j < n; ++j) {
        const PriceSlice& sl = bs.slices[j];
        TimePoint tp = m.at_tau(T[j]);
        double D = e.tau - T[j];
        double sq = 2.0 * std::sqrt(D);
        double coef = tw[j] * tp.aj_tilde() / tp.h;
        for (std::size_t q = 0; q < sl.xr.size(); ++q) {
            if (sl.wp[q] == 0.0) continue;
            JNode jn{};
            jn.cw = coef * sl.wp[q];
            jn.c1 = sl.xr[q] + tp.f - fe;
            jn.c2 = 2.0 * xB + fe - sl.xr[q] - tp.f;
            jn.D = D;
            jn.sq = sq;
            jn.E1 = std::exp(phi * jn.c1 + phi * phi * D);
            jn.E2 = std::exp(phi * jn.c2 + phi * phi * D);
            jn.lo1 = std::erf((xB - jn.c1 - 2.0 * phi * D) / sq);
            jn.lo2 = std::erf((xB - jn.c2 - 2.0 * phi * D) / sq);
            jn_.push_back(jn);
        }
    }
    c_ = tw[n] * e.tp.aj_tilde();
    g_end_ = g_value(m, e.tp, xB);
}

double ThetaEval::theta_r(double x) const {
    const double phi = e_.tp.phi;
    if (x <= e_.x_B) return base_;
    double lay = 0.0;
    double ex = std::exp(phi * x);
    for (const LayerK& k : lk_) {
        double ea = exp_erf_diff(k.Ea, (x - k.a - 2.0 * phi * k.D) / k.sq, k.lo_a);
        double eb = exp_erf_diff(k.Eb, (x - k.b - 2.0 * phi * k.D) / k.sq, k.lo_b);
        double SL = 0.5 * (ea - eb);
        double DL = 0.5 * phi * (ea + eb) + k.Gd -
                    ex * (std::exp(-(x - k.a) * (x - k.a) / (4.0 * k.D)) +
                          std::exp(-(x - k.b) * (x - k.b) / (4.0 * k.D))) /
                        (2.0 * std::sqrt(kPi * k.D));
        lay += k.w * (-k.mu * SL + k.g * DL);
    }
    lay -= boundary_layer_fix(x, false);
    double jump = 0.0;
    for (const JNode& j : jn_) {
        double A1 = std::erf((x - j.c1 - 2.0 * phi * j.D) / j.sq) - j.lo1;
        double A2 = std::erf((x - j.c2 - 2.0 * phi * j.D) / j.sq) - j.lo2;
        jump += j.cw * 0.5 * (j.E1 * A1 - j.E2 * A2);
    }
    return base_ + e_.tp.h * (lay + jump);
}

// Within sqrt(delta) of the boundary the image-pair term e^{phi x}(Ga + Gb)/(2 sqrt(pi D)) steps at
// sqrt(D) ~ x - x_B, which the fixed rule cannot resolve on the last interval. The fix is the exact
// integral of its local form g_e e^{phi x_B} e^{-d^2/4D}/sqrt(pi D) minus the rule's sum of it, or
// the x-derivative of that when deriv is set.
double ThetaEval::boundary_layer_fix(double x, bool deriv) const {
    const double d = x - e_.x_B;
    if (!(delta_ > 0.0) || !(d > 0.0) || d * d > 200.0 * delta_) return 0.0;
    const double sd = std::sqrt(delta_);
    double rule = 0.0;
    for (std::size_t i : last_) {
        const LayerK& k = lk_[i];
        double G = std::exp(-d * d / (4.0 * k.D)) / std::sqrt(kPi * k.D);
        rule += k.w * (deriv ? -d / (2.0 * k.D) * G : G);
    }
    double exact = deriv ? -std::erfc(d / (2.0 * sd))
                         : 2.0 * sd / kSqrtPi * std::exp(-d * d / (4.0 * delta_)) - d * std::erfc(d / (2.0 * sd));
    return g_end_ * std::exp(e_.tp.phi * e_.x_B) * (exact - rule);
}

double ThetaEval::u_layers(double x) const {
    double s = -boundary_layer_fix(x, true) * std::exp(-e_.tp.phi * x);
    for (const LayerK& k : lk_) {
        double ua = x - k.a, ub = x - k.b;
        double Ga = std::exp(-ua * ua / (4.0 * k.D)), Gb = std::exp(-ub * ub / (4.0 * k.D));
        double v = (Ga - Gb) / (2.0 * std::sqrt(kPi * k.D));
        double vx = (ua * Ga + ub * Gb) / (4.0 * kSqrtPi * k.D * std::sqrt(k.D));
        s += k.w * (-k.mu * v + k.g * vx);
    }
    return s;
}

double ThetaEval::u_jump(double x) const {
    double s = 0.0;
    for (const JNode& j : jn_) {
        double u1 = x - j.c1, u2 = x - j.c2;
        s += j.cw * (std::exp(-u1 * u1 / (4.0 * j.D)) - std::exp(-u2 * u2 / (4.0 * j.D))) /
             (2.0 * std::sqrt(kPi * j.D));
    }
    return s;
}

double ThetaEval::u_total(double x, double P) const {
    return u_layers(x) + u_jump(x) + c_ * P / e_.tp.h;
}

double ThetaEval::q_at(double x) const {
    if (x <= e_.x_B) return base_;
    double th = theta_r(x);
    if (c_ == 0.0) return th;
    auto f = [&](double eta) { return std::exp(c_ * (x - eta)) * theta_r(eta); };
    double Q = integrate_adaptive(f, e_.x_B, x, 15, 1e-10);
    return th + c_ * Q;
}

double ThetaEval::price(double x) const {
    return std::exp(-e_.tp.phi * x) * q_at(x);
}

std::vector<double> ThetaEval::prices(const std::vector<double>& xs) const {
    std::vector<double> out(xs.size());
    double Q = 0.0, xprev = e_.x_B;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        double x = xs[j];
        if (j > 0 && x < xs[j - 1]) throw std::invalid_argument("prices: points must ascend");
        if (x <= e_.x_B) {
            out[j] = std::exp(-e_.tp.phi * x) * base_;
            continue;
        }
        if (c_ != 0.0 && x > xprev) {
            auto f = [&](double eta) { return std::exp(c_ * (x - eta)) * theta_r(eta); };
            Q = std::exp(c_ * (x - xprev)) * Q +
                integrate_adaptive(f, xprev, x, 15, 1e-10);
            xprev = x;
        }
        out[j] = std::exp(-e_.tp.phi * x) * (theta_r(x) + c_ * Q);
    }
    return out;
}

PriceSlice ThetaEval::tabulate(const std::vector<double>& xg) const {
    PriceSlice sl;
    sl.phi = e_.tp.phi;
    sl.x = xg;
    sl.q.assign(xg.size(), 0.0);
    double th_prev = theta_r(xg[0]);
    double Q = 0.0;
    sl.q[0] = th_prev;
    for (std::size_t j = 1; j < xg.size(); ++j) {
        double dx = xg[j] - xg[j - 1];
        double th_mid = theta_r(xg[j - 1] + 0.5 * dx);
        double th = theta_r(xg[j]);
        // Simpson on e^{c(x_j - eta)} Theta over the cell.
        Q = std::exp(c_ * dx) * Q +
            dx / 6.0 * (std::exp(c_ * dx) * th_prev + 4.0 * std::exp(0.5 * c_ * dx) * th_mid + th);
        sl.q[j] = th + c_ * Q;
        th_prev = th;
    }
    return sl;
}

std::vector<double> xi_grid(double x_B, int points, double width) {
    std::vector<double> x(static_cast<std::size_t>(points));
    double den = std::expm1(kGridCurvature);
    for (int j = 0; j < points; ++j) {
        double u = static_cast<double>(j) / (points - 1);
        x[static_cast<std::size_t>(j)] = x_B + width * std::expm1(kGridCurvature * u) / den;
    }
    return x;
}

}  // namespace amput::detail

namespace amput {

using detail::Endpoint;

double g_boundary(const Model& m, const BoundaryState& bs, double tau) {
    if (tau == 0.0) return g_value(m, m.at_tau(0.0), m.k());
    std::size_t n = 0;
    Endpoint e = detail::interp_endpoint(m, bs, tau, n);
    return g_value(m, e.tp, e.x_B);
}

double G_at_boundary(const Model& m, const BoundaryState& bs, double tau) {
    return g_boundary(m, bs, tau);
}

double Gz_at_boundary(const Model& m, const BoundaryState& bs, std::size_t i) {
    if (i >= bs.committed()) throw std::out_of_range("Gz_at_boundary: node not committed");
    if (i == 0) return 0.0;  // empty s-range
    Endpoint e = detail::node_endpoint(m, bs, i);
    auto layers = detail::build_layers(m, bs, i, e);
    auto parts = detail::neumann_parts(m, bs, i, e, layers);
    return parts.R0 + parts.We * e.psi;
}

double G_interior(const Model& m, const BoundaryState& bs, double tau, double z, Quadrature rule) {
    std::size_t n = 0;
    Endpoint e = detail::interp_endpoint(m, bs, tau, n);
    if (!(z > e.y)) throw std::domain_error("G_interior: z must lie above the boundary");
    const double pi = 3.14159265358979323846;
    auto integrand = [&](const detail::Layer& L, double D) {
        double ua = z - L.y, ub = z + L.y - 2.0 * e.y;
        double Ga = std::exp(-ua * ua / (4.0 * D)), Gb = std::exp(-ub * ub / (4.0 * D));
        double v = (Ga - Gb) / (2.0 * std::sqrt(pi * D));
        double vx = (ua * Ga + ub * Gb) / (4.0 * std::sqrt(pi) * D * std::sqrt(D));
        double mu = L.psi(e.psi) + L.yp * L.g;
        return -mu * v + L.g * vx;
    };
    if (rule == Quadrature::gauss_legendre) {
        double s = 0.0;
        for (const auto& L : detail::build_layers(m, bs, n, e)) s += L.w * integrand(L, e.tau - L.s);
        return s;
    }
    // D = tau - s is passed separately so that it keeps full precision next to the endpoint.
    auto at_d = [&](double s, double D) {
        if (!(s > 0.0) || !(D > 0.0)) return 0.0;
        return integrand(detail::layer_at(m, bs, n, e, s, m.at_tau_uncached(s)), D);
    };
    auto at = [&](double s) { return at_d(s, e.tau - s); };
    std::vector<double> T(bs.tau.begin(), bs.tau.begin() + static_cast<std::ptrdiff_t>(n));
    T.push_back(e.tau);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double a = T[j], b = T[j + 1];
        auto lo = [&](double aa, double bb) {
            double L = bb - aa;
            return detail::integrate_adaptive([&](double u) { return at(aa + L * u * u) * 2.0 * L * u; }, 0.0, 1.0, 15,
                                              1e-10);
        };
        // Near z = y the kernel concentrates within v ~ (z - y)/sqrt(L) of the endpoint; split there.
        auto hi = [&](double aa, double bb) {
            double L = bb - aa;
            auto f = [&](double v) {
                double D = (e.tau - bb) + L * v * v;
                return at_d(bb - L * v * v, D) * 2.0 * L * v;
            };
            double lo_v = 0.0, r = 0.0;
            for (double c = 0.25 * (z - e.y) / std::sqrt(L); c < 1.0; c *= 4.0) {
                r += detail::integrate_adaptive(f, lo_v, c, 12, 1e-10);
                lo_v = c;
            }
            return r + detail::integrate_adaptive(f, lo_v, 1.0, 12, 1e-10);
        };
        if (j == 0 && n == 1) {
            double mid = 0.5 * (a + b);
            total += lo(a, mid) + hi(mid, b);
        } else if (j == 0) {
            total += lo(a, b);
        } else if (j + 1 == n) {
            total += hi(a, b);
        } else {
            total += detail::integrate_adaptive(at, a, b, 15, 1e-10);
        }
    }
    return total;
}

}  // namespace amput
