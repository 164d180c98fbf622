// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "amput/collocation.hpp"
#include "amput/greens.hpp"
#include "amput/kou.hpp"
#include "amput/oracle.hpp"
#include "amput/pricer.hpp"
#include "amput/special.hpp"
#include "amput/volterra.hpp"
#include "support/oracles.hpp"

using namespace amput;

namespace {

const std::vector<double> kStrikes{50, 55, 60, 65, 70, 75, 80};

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
    std::printf("%s %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double rel(double got, double ref, double floor) {
    double d = std::abs(got - ref);
    return d == 0.0 ? 0.0 : d / std::max(std::abs(ref), floor);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Solved {
    double K = 0.0;
    std::unique_ptr<Model> model;
    BoundarySolution sol;
    double seconds = 0.0;
};

Solved solve_strike(double K, const SolverConfig& cfg) {
    Solved s;
    s.K = K;
    s.model = std::make_unique<Model>(table1_params(K));
    auto t0 = std::chrono::steady_clock::now();
    s.sol = solve_boundary(*s.model, cfg);
    s.seconds = seconds_since(t0);
    return s;
}

// Largest K1 value over the source interval, used as a floor where K1 crosses zero.
double k1_floor(const K1Args& a) { return 1e-6 * oracle::K1_l1(a); }

void ac1() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double wk = 0.0, wi = 0.0, wg = 0.0;
    for (int i = 0; i < 100; ++i) {
        K1Args a = oracle::random_k1(rng);
        wk = std::max(wk, rel(K1_closed(a).get(), oracle::K1(a), k1_floor(a)));
    }
    for (int i = 0; i < 100; ++i) {
        IArgs a = oracle::random_i(rng);
        IValues got = I_integrals(a), ref = oracle::I_integrals(a);
        wi = std::max({wi, rel(got.I1, ref.I1, 1e-12), rel(got.I2, ref.I2, 1e-12), rel(got.I3, ref.I3, 1e-12)});
    }
    for (int i = 0; i < 100; ++i) {
        double tau = std::exp(std::log(1e-4) + U(rng) * std::log(1e4));
        double Y = -0.5 * U(rng), z = Y + 1.5 * U(rng), f = 0.2 * (U(rng) - 0.5);
        wg = std::max(wg, rel(gamma_integral_closed(60.0, f, tau, z, Y, 0.0),
                              oracle::gamma_integral(60.0, f, tau, z, Y, 0.0), 1e-12));
    }
    bool ok = wk <= 1e-8 && wi <= 1e-8 && wg <= 1e-8;
    report("AC1", ok, fmt("kernels vs quadrature, max rel: K1 %.2e  I %.2e  Gamma %.2e (tol 1e-8)", wk, wi, wg));
}

void ac2(const Solved& s) {
    const auto& bs = s.sol.bs;
    double worst = 0.0;
    for (std::size_t i = 1; i < bs.committed(); ++i) {
        auto G = [&](double e) { return G_interior(*s.model, bs, bs.tau[i], bs.y[i] + e); };
        double g1 = G(1e-3), g2 = G(1e-4), g3 = G(1e-5);
        double r1 = (10.0 * g2 - g1) / 9.0, r2 = (10.0 * g3 - g2) / 9.0;
        double lim = (10.0 * r2 - r1) / 9.0;
        double g = g_boundary(*s.model, bs, bs.tau[i]);
        worst = std::max(worst, std::abs(lim - g) / (1.0 + std::abs(g)));
    }
    report("AC2", worst <= 1e-6, fmt("extrapolated G_interior vs g, max |diff|/(1+|g|) %.2e (tol 1e-6)", worst));
}

void ac3(const Solved& s) {
    const auto& bs = s.sol.bs;
    double tau = bs.tau.back(), xB = bs.x_B.back();
    std::vector<double> xg;
    for (int j = 0; j <= 1560; ++j) xg.push_back(xB + 0.05 + 0.00125 * j);
    double solved = verify_ode_residual(*s.model, bs, tau, xg);

    const double phi = 0.7, dx = 0.00125;
    std::vector<double> x, P, hU;
    for (int j = 0; j < 800; ++j) {
        double v = -0.5 + j * dx;
        x.push_back(v);
        P.push_back(std::exp(-v * v));
        hU.push_back((phi - 2.0 * v) * std::exp(-v * v));
    }
    double manufactured = ode_residual(phi, x, P, hU);
    report("AC3", solved <= 1e-5 && manufactured <= 1e-8,
           fmt("ODE residual: solved K=60 %.2e (tol 1e-5), manufactured %.2e (tol 1e-8)", solved, manufactured));
}

void ac4(const std::vector<Solved>& runs) {
    bool ok = true;
    int max_it = 0;
    double max_sec = 0.0, worst_s0 = 0.0, worst_rise = 0.0;
    for (const auto& s : runs) {
        const auto& bs = s.sol.bs;
        ok = ok && bs.committed() == bs.grid.size();
        for (const auto& d : s.sol.diag) {
            ok = ok && d.converged;
            max_it = std::max(max_it, d.iterations);
        }
        double s0 = s.model->S_star() * std::exp(bs.x_B.front());
        worst_s0 = std::max(worst_s0, std::abs(s0 - s.K));
        // x_B falls as tau grows, so S_B(t) rises toward expiry.
        for (std::size_t i = 1; i < bs.committed(); ++i) worst_rise = std::max(worst_rise, bs.x_B[i] - bs.x_B[i - 1]);
        max_sec = std::max(max_sec, s.seconds);
    }
    ok = ok && max_it <= 10 && worst_s0 == 0.0 && worst_rise <= 0.0 && max_sec <= 1.0;
    report("AC4", ok,
           fmt("7 strikes: max iterations %.0f (<= 10), max |S_B(T)-K| %.1e, max x_B increase %.1e", max_it,
               worst_s0, worst_rise) +
               fmt(", slowest strike %.3f s (<= 1 s)", max_sec));
}

void ac5(const std::vector<Solved>& runs) {
    FDConfig fc;
    fc.Nx = 1600;
    fc.Nt = 800;
    std::vector<std::future<FDResult>> fds;
    for (const auto& s : runs) fds.push_back(std::async(std::launch::async, [&s, fc]() {
        return fd_pide_american(fc, s.model->params());
    }));
    double atm = 0.0, wing = 0.0, bnd = 0.0;
    for (std::size_t j = 0; j < runs.size(); ++j) {
        const Solved& s = runs[j];
        FDResult fd = fds[j].get();
        PriceResult pr = price_query(*s.model, s.sol.bs, PriceQuery{0.0, {0.8 * s.K, s.K, 1.2 * s.K}});
        for (int k = 0; k < 3; ++k) {
            double S = (k == 0 ? 0.8 : k == 1 ? 1.0 : 1.2) * s.K;
            double ref = fd.price(S);
            double d = std::abs(pr.prices[k] - ref) / ref;
            (k == 1 ? atm : wing) = std::max(k == 1 ? atm : wing, d);
        }
        for (std::size_t i = 0; i < fd.times.size(); ++i) {
            if (!std::isfinite(fd.boundary[i])) continue;
            double git = boundary_at_t(*s.model, s.sol.bs, fd.times[i]);
            bnd = std::max(bnd, std::abs(git - fd.boundary[i]) / s.K);
        }
    }
    report("AC5", atm <= 0.01 && wing <= 0.02 && bnd <= 0.02,
           fmt("vs FD 1600x800: ATM rel %.2e (<= 1e-2), wings rel %.2e (<= 2e-2), boundary %.2e K (<= 2e-2)", atm,
               wing, bnd));
}

void ac6() {
    const double K = 50.0;
    ParamSet p = constant_params(K, 0.2, 0.1, 0.5, 0.0, 1.0, 1.0);
    TreeResult tr = tree_american(TreeConfig{400, 0.2, 0.1, 0.5, 1.0, K}, OptionType::put);
    FDConfig fc;
    fc.Nx = 800;
    fc.Nt = 400;
    FDResult fd = fd_pide_american(fc, p);
    double worst = 0.0;
    for (double S : {40.0, 45.0, 50.0, 55.0, 60.0}) worst = std::max(worst, std::abs(tr.price(S) - fd.price(S)) / K);
    // The level before expiry: one grid step in S is K(1 - e^{-dx}).
    double step = K * (1.0 - std::exp(-tr.dx));
    double near_T = tr.boundary[tr.boundary.size() - 2];
    bool approach = std::abs(tr.boundary.back() - K) <= 1e-9 * K && std::abs(near_T - K) <= step * (1.0 + 1e-9);
    bool refused = false;
    std::string why;
    try {
        Model m(p);
        solve_boundary(m, SolverConfig{});
    } catch (const SingularLimitError& e) {
        refused = true;
        why = e.what();
    }
    report("AC6", worst <= 0.002 && approach && refused && !why.empty(),
           fmt("no jumps: tree vs FD %.2e K (<= 2e-3), S_B(T-dt) = %.4f within step %.4f of K", worst, near_T, step) +
               (refused ? ", solver refused: " + why : ", solver did not refuse"));
}

void ac7(const Solved& s) {
    double defect = orthogonality_defect(ELBasis{13, 10.0, 0.0});
    double rec = 0.0;
    ELBasis lb{13, 10.0, -0.2};
    for (double x : {-0.2, -0.1, 0.0, 0.3, 1.0, 4.0, 15.0, 60.0}) {
        double sv = el_map(lb, x);
        for (int n = 0; n <= 12; ++n) rec = std::max(rec, std::abs(eval_basis(lb, n, x) - std::legendre(n, sv)));
    }
    const auto& bs = s.sol.bs;
    std::size_t i = bs.committed() - 1;
    DiscretizedSystem sys = assemble_discretized_system(ELBasis{12, 10.0, 0.0}, *s.model, bs, i);
    auto alpha = sys.solve();
    double worst = 0.0;
    for (double d : {0.05, 0.2, 0.5, 1.0, 2.0}) {
        double x = bs.x_B[i] + d;
        double ref = price_at(*s.model, bs, bs.tau[i], x);
        worst = std::max(worst, std::abs(sys.price(alpha, x) - ref) / ref);
    }
    report("AC7", defect <= 1e-10 && rec <= 1e-13 && worst <= 0.005,
           fmt("orthogonality %.2e (<= 1e-10), recurrence %.2e (<= 1e-13), N=12 L=10 price vs price_at rel %.2e "
               "(<= 5e-3)",
               defect, rec, worst));
}

void ac8() {
    KouOperatorCoeffs c;
    c.theta1 = 3.0;
    c.theta2 = 2.0;
    const double xB = -0.5;
    // Decays slower than the homogeneous solution, so the relative error is meaningful on the whole range.
    auto P = [](double x) { return std::exp(-0.8 * x) * (2.0 + std::sin(x)); };
    auto f = [&](double x) {
        double e = std::exp(-0.8 * x), s = std::sin(x), co = std::cos(x);
        double p0 = e * (2.0 + s);
        double p1 = e * (co - 0.8 * (2.0 + s));
        double p2 = e * (0.64 * (2.0 + s) - 1.6 * co - s);
        return u_from_P(c, p0, p1, p2);
    };
    double rt = 0.0;
    for (double x : {-0.5, -0.2, 0.0, 0.4, 1.1, 2.5, 5.0}) rt = std::max(rt, rel(solve_P_from_u_closed(c, f, xB, P(xB), x), P(x), 0.0));

    std::mt19937_64 rng(808);
    double dk = 0.0;
    for (int i = 0; i < 100; ++i) {
        K1Args a = oracle::random_k1(rng);
        double h = 1e-2 * std::sqrt(a.dtau);
        auto at = [&](double d) {
            K1Args b = a;
            b.xi += d;
            return K1_closed(b).get();
        };
        // Richardson on central differences at h and h/2, fourth order.
        double c1 = (at(h) - at(-h)) / (2 * h), c2 = (at(h / 2) - at(-h / 2)) / h;
        double c3 = (at(h / 4) - at(-h / 4)) / (h / 2);
        double r1 = (4 * c2 - c1) / 3, r2 = (4 * c3 - c2) / 3;
        double fd = (16 * r2 - r1) / 15;
        dk = std::max(dk, rel(dK1_dxi(a), fd, 1e-6 * oracle::K1_l1(a) / std::sqrt(a.dtau)));
    }
    report("AC8", rt <= 1e-7 && dk <= 1e-7,
           fmt("Kou round trip max rel %.2e (<= 1e-7), dK1/dxi vs FD max rel %.2e (<= 1e-7)", rt, dk));
}

void ac9() {
    const double K = 60.0;
    Model m(table1_params(K));
    SolverConfig c20, c40, tight;
    c40.M = 40;
    tight.node_tol = 1e-11;
    tight.root_tol = 1e-13;
    BoundarySolution a = solve_boundary(m, c20), b = solve_boundary(m, c40), t = solve_boundary(m, tight);
    double grid = 0.0, tol = 0.0;
    for (std::size_t i = 0; i < a.bs.committed(); ++i) {
        double ti = m.time_change().t_of_tau(a.bs.tau[i]);
        double sa = K * std::exp(a.bs.x_B[i]);
        grid = std::max(grid, std::abs(sa - boundary_at_t(m, b.bs, ti)) / K);
        tol = std::max(tol, std::abs(a.bs.x_B[i] - t.bs.x_B[i]));
    }
    report("AC9", grid <= 0.005 && tol <= 1e-6,
           fmt("M=20 vs M=40 boundary %.2e K (<= 5e-3), tolerance tightening |dx_B| %.2e (<= 1e-6)", grid, tol));
}

}  // namespace

int main() {
    try {
        ac1();
        std::vector<std::future<Solved>> jobs;
        for (double K : kStrikes) jobs.push_back(std::async(std::launch::deferred, [K]() {
            return solve_strike(K, SolverConfig{});
        }));
        std::vector<Solved> runs;
        for (auto& j : jobs) runs.push_back(j.get());
        const Solved& k60 = runs[2];
        ac2(k60);
        ac3(k60);
        ac4(runs);
        ac5(runs);
        ac6();
        ac7(k60);
        ac8();
        ac9();
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
