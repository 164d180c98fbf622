#include "amput/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace amput {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 4-point Lagrange interpolation on a uniform grid.
double cubic_uniform(const std::vector<double>& xs, const std::vector<double>& v, double x) {
    const std::size_t n = xs.size();
    double dx = xs[1] - xs[0];
    double u = (x - xs[0]) / dx;
    if (u <= 0.0) return v.front();
    if (u >= static_cast<double>(n - 1)) return v.back();
    std::size_t j = static_cast<std::size_t>(u);
    std::size_t s = j == 0 ? 0 : std::min(j - 1, n - 4);
    double r = 0.0;
    for (std::size_t a = s; a < s + 4; ++a) {
        double l = 1.0;
        for (std::size_t b = s; b < s + 4; ++b) {
            if (b != a) l *= (u - static_cast<double>(b)) / (static_cast<double>(a) - static_cast<double>(b));
        }
        r += l * v[a];
    }
    return r;
}

// a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i]
void thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c, std::vector<double>& d) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    d[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

struct JumpModel {
    bool kou = false;
    double lam = 0.0, phi = 1.0, th1 = 2.0, th2 = 1.0, p = 0.5;
    double mean_jump() const {  // E[e^Y - 1]
        if (!kou) return phi / (phi + 1.0) - 1.0;
        return p * th1 / (th1 - 1.0) + (1.0 - p) * th2 / (th2 + 1.0) - 1.0;
    }
};

JumpModel jump_model(const ParamSet& p, double t) {
    JumpModel j;
    j.lam = p.lam.value(t);
    if (p.kou) {
        j.kou = true;
        j.th1 = p.kou->theta1.value(t);
        j.th2 = p.kou->theta2.value(t);
        j.p = p.kou->p.value(t);
    } else {
        j.phi = p.phi.value(t);
    }
    return j;
}

// Exact integral of the piecewise-linear grid function against the jump density, by
// recursion in x. Below the grid the Put equals its lower boundary value, above it is zero.
std::vector<double> convolve(const JumpModel& jm, const std::vector<double>& x, const std::vector<double>& V,
                             double low_level, double low_slope_coef) {
    const std::size_t n = x.size();
    const double dx = x[1] - x[0];
    std::vector<double> C(n, 0.0);
    // downward jumps with rate a: C(x) = int_{-inf}^x V(w) a e^{a(w - x)} dw
    auto down = [&](double a, double wgt) {
        double E = std::exp(-a * dx);
        // tail: V = low_level - low_slope_coef e^w below x_0
        double c = low_level - low_slope_coef * std::exp(x[0]) * a / (a + 1.0);
        C[0] += wgt * c;
        for (std::size_t m = 1; m < n; ++m) {
            double sl = (V[m] - V[m - 1]) / dx;
            c = E * c + V[m - 1] * (1.0 - E) + sl * (dx - (1.0 - E) / a);
            C[m] += wgt * c;
        }
    };
    auto up = [&](double a, double wgt) {
        double E = std::exp(-a * dx);
        double c = 0.0;
        for (std::size_t m = n - 1; m-- > 0;) {
            double sl = (V[m + 1] - V[m]) / dx;
            c = E * c + V[m] * (1.0 - E) + sl * ((1.0 - E) / a - dx * E);
            C[m] += wgt * c;
        }
    };
    if (jm.kou) {
        up(jm.th1, jm.p);
        down(jm.th2, 1.0 - jm.p);
    } else {
        down(jm.phi, 1.0);
    }
    return C;
}

}  // namespace

double TreeResult::price(double spot) const {
    std::vector<double> xs(S.size());
    for (std::size_t j = 0; j < S.size(); ++j) xs[j] = std::log(S[j]);
    return cubic_uniform(xs, V0, std::log(spot));
}

TreeResult tree_american(const TreeConfig& cfg, OptionType type) {
    if (cfg.steps < 10) throw std::invalid_argument("tree needs at least 10 steps");
    if (!(cfg.sigma > 0.0) || !(cfg.T > 0.0) || !(cfg.K > 0.0)) throw std::invalid_argument("bad tree parameters");
    const int N = cfg.steps;
    const double dt = cfg.T / N;
    const double dx = cfg.sigma * std::sqrt(3.0 * dt);
    const double nu = cfg.r - cfg.q - 0.5 * cfg.sigma * cfg.sigma;
    const double a = (cfg.sigma * cfg.sigma * dt + nu * nu * dt * dt) / (dx * dx);
    const double b = nu * dt / dx;
    const double pu = 0.5 * (a + b), pd = 0.5 * (a - b), pm = 1.0 - a;
    const double disc = std::exp(-cfg.r * dt);
    const int J = N + 2;
    const std::size_t W = static_cast<std::size_t>(2 * J + 1);

    TreeResult res;
    res.dx = dx;
    res.S.resize(W);
    std::vector<double> pay(W);
    for (std::size_t j = 0; j < W; ++j) {
        res.S[j] = cfg.K * std::exp((static_cast<double>(j) - J) * dx);
        pay[j] = type == OptionType::put ? std::max(cfg.K - res.S[j], 0.0) : std::max(res.S[j] - cfg.K, 0.0);
    }
    std::vector<double> V = pay, Vn(W);
    res.times.resize(static_cast<std::size_t>(N) + 1);
    res.boundary.assign(static_cast<std::size_t>(N) + 1, kNaN);
    res.times[static_cast<std::size_t>(N)] = cfg.T;
    double ratio = cfg.q > 0.0 ? cfg.r / cfg.q : std::numeric_limits<double>::infinity();
    res.boundary[static_cast<std::size_t>(N)] =
        type == OptionType::put ? cfg.K * std::min(1.0, ratio) : cfg.K * std::max(1.0, ratio);
    const double tol = 1e-12 * cfg.K;
    for (int n = N - 1; n >= 0; --n) {
        Vn[0] = pay[0];
        Vn[W - 1] = pay[W - 1];
        for (std::size_t j = 1; j + 1 < W; ++j) {
            double cont = disc * (pu * V[j + 1] + pm * V[j] + pd * V[j - 1]);
            Vn[j] = std::max(cont, pay[j]);
        }
        std::swap(V, Vn);
        res.times[static_cast<std::size_t>(n)] = n * dt;
        if (type == OptionType::put) {
            for (std::size_t j = 1; j + 1 < W && pay[j] > 0.0 && V[j] - pay[j] <= tol; ++j) {
                res.boundary[static_cast<std::size_t>(n)] = res.S[j];
            }
        } else {
            for (std::size_t j = W - 2; j > 0 && pay[j] > 0.0 && V[j] - pay[j] <= tol; --j) {
                res.boundary[static_cast<std::size_t>(n)] = res.S[j];
            }
        }
    }
    res.V0 = V;
    return res;
}

double FDResult::price(double spot) const {
    return cubic_uniform(x, V.back(), std::log(spot / S_star));
}

double FDResult::price_at(double t, double spot) const {
    // times descend from T to 0
    double xv = std::log(spot / S_star);
    if (t >= times.front()) return cubic_uniform(x, V.front(), xv);
    if (t <= times.back()) return cubic_uniform(x, V.back(), xv);
    std::size_t n = 0;
    while (times[n + 1] > t) ++n;
    double w = (times[n] - t) / (times[n] - times[n + 1]);
    return (1.0 - w) * cubic_uniform(x, V[n], xv) + w * cubic_uniform(x, V[n + 1], xv);
}

double FDResult::boundary_at(double t) const {
    if (t >= times.front()) return boundary.front();
    if (t <= times.back()) return boundary.back();
    std::size_t n = 0;
    while (times[n + 1] > t) ++n;
    double w = (times[n] - t) / (times[n] - times[n + 1]);
    return (1.0 - w) * boundary[n] + w * boundary[n + 1];
}

FDResult fd_pide_american(const FDConfig& cfg, const ParamSet& p) {
    p.validate();
    if (cfg.Nx < 50 || cfg.Nt < 50) throw std::invalid_argument("FD grid needs Nx, Nt >= 50");
    if (!(cfg.x_lo < 0.0 && cfg.x_hi > 0.0)) throw std::invalid_argument("FD grid must straddle k");
    if (!(cfg.penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
    const double k = p.k(), K = p.K, Ss = p.S_star;
    const std::size_t n = static_cast<std::size_t>(cfg.Nx) + 1;
    const double dx = (cfg.x_hi - cfg.x_lo) / cfg.Nx;
    FDResult res;
    res.S_star = Ss;
    res.x.resize(n);
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) {
        res.x[j] = k + cfg.x_lo + dx * static_cast<double>(j);
        g[j] = std::max(K - Ss * std::exp(res.x[j]), 0.0);
    }
    const double dt = p.T / cfg.Nt;
    std::vector<double> V = g;
    res.times.push_back(p.T);
    res.V.push_back(V);
    {
        double r0 = p.r.value(p.T), q0 = p.q.value(p.T);
        double ratio = q0 > 0.0 ? r0 / q0 : std::numeric_limits<double>::infinity();
        res.boundary.push_back(cfg.american ? K * std::min(1.0, ratio) : kNaN);
    }

    // Tridiagonal operator D = a2 d_xx + a1 d_x - (r + lam) at time t, interior rows only.
    auto coeffs = [&](double t, std::vector<double>& lo, std::vector<double>& di, std::vector<double>& up) {
        JumpModel jm = jump_model(p, t);
        double s = p.sigma.value(t);
        double a2 = 0.5 * s * s;
        double a1 = p.r.value(t) - p.q.value(t) - a2 - jm.lam * jm.mean_jump();
        double rr = p.r.value(t) + jm.lam;
        lo.assign(n, a2 / (dx * dx) - a1 / (2.0 * dx));
        di.assign(n, -2.0 * a2 / (dx * dx) - rr);
        up.assign(n, a2 / (dx * dx) + a1 / (2.0 * dx));
    };
    // Discount factors for the lower Dirichlet value of a European Put.
    auto lower_value = [&](double t) {
        if (cfg.american) return g[0];
        double R = p.r.integral(t, p.T), Q = p.q.integral(t, p.T);
        return std::max(K * std::exp(-R) - Ss * std::exp(res.x[0] - Q), 0.0);
    };
    auto jump_term = [&](double t, const std::vector<double>& U) {
        JumpModel jm = jump_model(p, t);
        std::vector<double> C;
        if (jm.lam == 0.0) return std::vector<double>(n, 0.0);
        C = convolve(jm, res.x, U, K, Ss);
        for (double& c : C) c *= jm.lam;
        return C;
    };

    // Solves (I - theta dt D(t1)) V = rhs with penalty on the exercise constraint.
    auto implicit_solve = [&](double t1, double theta_dt, std::vector<double> rhs) {
        std::vector<double> lo, di, up;
        coeffs(t1, lo, di, up);
        std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0);
        for (std::size_t j = 1; j + 1 < n; ++j) {
            a[j] = -theta_dt * lo[j];
            b[j] = 1.0 - theta_dt * di[j];
            c[j] = -theta_dt * up[j];
        }
        rhs[0] = lower_value(t1);
        rhs[n - 1] = 0.0;
        std::vector<char> active(n, 0), prev(n, 2);
        std::vector<double> sol;
        for (int it = 0; it < 100; ++it) {
            std::vector<double> bb = b, d = rhs;
            if (cfg.american) {
                for (std::size_t j = 1; j + 1 < n; ++j) {
                    if (active[j]) {
                        bb[j] += cfg.penalty;
                        d[j] += cfg.penalty * g[j];
                    }
                }
            }
            thomas(a, bb, c, d);
            sol = d;
            if (!cfg.american) break;
            prev = active;
            bool changed = false;
            for (std::size_t j = 1; j + 1 < n; ++j) {
                active[j] = sol[j] < g[j] ? 1 : 0;
                if (active[j] != prev[j]) changed = true;
            }
            if (!changed) break;
        }
        return sol;
    };

    std::vector<double> C_prev, Cn;
    for (int step = 0; step < cfg.Nt; ++step) {
        double t0 = p.T - step * dt;
        double t1 = p.T - (step + 1) * dt;
        std::vector<double> Vn;
        if (step < cfg.rannacher_steps) {
            // two implicit half steps
            double tm = 0.5 * (t0 + t1);
            std::vector<double> C0 = jump_term(t0, V);
            std::vector<double> rhs(n);
            for (std::size_t j = 0; j < n; ++j) rhs[j] = V[j] + 0.5 * dt * C0[j];
            std::vector<double> Vh = implicit_solve(tm, 0.5 * dt, rhs);
            std::vector<double> C1 = jump_term(tm, Vh);
            for (std::size_t j = 0; j < n; ++j) rhs[j] = Vh[j] + 0.5 * dt * C1[j];
            Vn = implicit_solve(t1, 0.5 * dt, rhs);
            Cn = C0;
        } else {
            std::vector<double> lo, di, up;
            coeffs(t0, lo, di, up);
            std::vector<double> C0 = jump_term(t0, V);
            std::vector<double> rhs(n);
            for (std::size_t j = 1; j + 1 < n; ++j) {
                double DV = lo[j] * V[j - 1] + di[j] * V[j] + up[j] * V[j + 1];
                double Cx = C_prev.empty() ? C0[j] : 1.5 * C0[j] - 0.5 * C_prev[j];
                rhs[j] = V[j] + 0.5 * dt * DV + dt * Cx;
            }
            Vn = implicit_solve(t1, 0.5 * dt, rhs);
            Cn = C0;
        }
        C_prev = Cn;
        V = std::move(Vn);
        for (double v : V) {
            if (!std::isfinite(v) || std::abs(v) > 2.0 * K) {
                throw std::runtime_error("FD solution oscillates beyond the strike; use a smaller time step");
            }
        }
        res.times.push_back(t1);
        res.V.push_back(V);

        double SB = kNaN;
        if (cfg.american) {
            const double tol = 10.0 * K / cfg.penalty;
            std::size_t jf = 0;
            bool any = false;
            for (std::size_t j = 1; j + 1 < n && g[j] > 0.0 && V[j] - g[j] <= tol; ++j) {
                jf = j;
                any = true;
            }
            if (any && jf + 2 < n) {
                double x1 = res.x[jf + 1], x2 = res.x[jf + 2];
                double s1 = std::sqrt(std::max(V[jf + 1] - g[jf + 1], 0.0));
                double s2 = std::sqrt(std::max(V[jf + 2] - g[jf + 2], 0.0));
                double xb = x1;
                if (s2 > s1) xb = x1 - s1 * (x2 - x1) / (s2 - s1);
                xb = std::clamp(xb, res.x[jf], x1);
                SB = Ss * std::exp(xb);
            }
        }
        res.boundary.push_back(SB);
    }
    double worst = 0.0;
    for (const auto& lvl : res.V) {
        for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, g[j] - lvl[j]);
    }
    res.penalty_residual = cfg.american ? worst : 0.0;
    return res;
}

}  // namespace amput
