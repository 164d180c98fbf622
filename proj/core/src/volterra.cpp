#include "amput/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "engine.hpp"

namespace amput {

namespace {

constexpr int kScanSteps = 8;
constexpr int kMaxWidenings = 10;
constexpr double kInitialWidth = 0.5;

}  // namespace

const char* to_string(GridKind g) {
    return g == GridKind::uniform ? "uniform" : "refined";
}

GridKind grid_kind_from_string(const std::string& s) {
    if (s == "uniform") return GridKind::uniform;
    if (s == "refined" || s == "geometric-refined-near-expiry") return GridKind::refined;
    throw std::invalid_argument("unknown grid kind: " + s);
}

void SolverConfig::validate() const {
    if (M < 2) throw std::invalid_argument("M must be at least 2");
    if (!(node_tol > 0.0) || !(root_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
    if (xi_points < 5) throw std::invalid_argument("xi_points must be at least 5");
    if (!(L > 0.0) || !(xi_trunc > 0.0)) throw std::invalid_argument("L and xi_trunc must be positive");
    if (slice_refine < 1) throw std::invalid_argument("slice_refine must be positive");
}

std::vector<double> tau_grid(const SolverConfig& cfg, double tau_max) {
    std::vector<double> g(static_cast<std::size_t>(cfg.M) + 1);
    for (int i = 0; i <= cfg.M; ++i) {
        double u = static_cast<double>(i) / cfg.M;
        g[static_cast<std::size_t>(i)] = tau_max * (cfg.grid == GridKind::uniform ? u : u * u);
    }
    g.back() = tau_max;
    return g;
}

BoundaryState init_node0(const Model& m, const SolverConfig& cfg) {
    cfg.validate();
    if (m.params().no_jump() && !cfg.allow_no_jump) {
        throw SingularLimitError(
            "lambda is identically zero with constant phi: the jump coupling vanishes and the "
            "integral-transform solver does not apply; use the tree or FD oracle instead");
    }
    BoundaryState bs;
    bs.grid = tau_grid(cfg, m.time_change().tau_max());
    bs.xi_points = cfg.xi_points;
    bs.xi_width = cfg.xi_trunc * cfg.L;
    TimePoint tp = m.at_tau(0.0);
    double k = m.k();
    bs.tau = {0.0};
    bs.y = {k};
    bs.x_B = {k};
    bs.Pxx = {pxx_boundary_relation(m, tp, k)};
    bs.g = {g_value(m, tp, k)};
    bs.yprime = {0.0};
    bs.h_at = {tp.h};
    bs.psi = {(bs.Pxx[0] - m.S_star() * tp.phi * std::exp(k)) / tp.h};
    PriceSlice sl;
    sl.phi = tp.phi;
    sl.x = detail::xi_grid(k, bs.xi_points, bs.xi_width);
    sl.q.assign(sl.x.size(), 0.0);
    sl.build_quadrature(cfg.slice_refine);
    bs.slices = {sl};
    return bs;
}

double solve_Pxx_node(const Model& m, const BoundaryState& bs, std::size_t i, double x_B) {
    if (i == 0 || i != bs.committed() || i >= bs.grid.size()) {
        throw SolverError("solve_Pxx_node: nodes before i must be committed", static_cast<int>(i));
    }
    detail::Endpoint e = detail::make_endpoint(m, bs.grid[i], x_B, 0.0);
    auto layers = detail::build_layers(m, bs, i, e);
    auto parts = detail::neumann_parts(m, bs, i, e, layers);
    double den = 1.0 - parts.We;
    if (std::abs(den) < 1e-14) throw SolverError("degenerate endpoint weight", static_cast<int>(i));
    double ps = parts.R0 / den;
    return e.tp.h * ps + m.S_star() * e.tp.phi * std::exp(x_B);
}

double solve_xB_node(const Model& m, const BoundaryState& bs, std::size_t i, const SolverConfig& cfg,
                     int* evals) {
    TimePoint tp = m.at_tau(bs.grid.at(i));
    int count = 0;
    auto res = [&](double x) {
        ++count;
        return solve_Pxx_node(m, bs, i, x) - pxx_boundary_relation(m, tp, x);
    };
    double top = bs.x_B[i - 1];
    double hi = top, r_hi = res(hi);
    double lo = hi, r_lo = r_hi;
    bool found = false;
    double width = kInitialWidth;
    double scanned = 0.0;
    for (int w = 0; w <= kMaxWidenings && !found; ++w) {
        double step = (width - scanned) / kScanSteps;
        for (int s = 1; s <= kScanSteps; ++s) {
            double x = top - scanned - s * step;
            double r = res(x);
            if (!std::isfinite(r)) throw SolverError("non-finite residual", static_cast<int>(i));
            if ((r > 0.0) != (r_hi > 0.0) || r == 0.0) {
                lo = x;
                r_lo = r;
                found = true;
                break;
            }
            hi = x;
            r_hi = r;
        }
        scanned = width;
        width *= 2.0;
    }
    if (!found) {
        if (evals) *evals = count;
        throw SolverError("no sign change for x_B below the previous node", static_cast<int>(i));
    }
    if (r_lo == 0.0) {
        if (evals) *evals = count;
        return lo;
    }
    std::uintmax_t max_iter = 200;
    double tol = cfg.root_tol;
    auto term = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    auto pr = boost::math::tools::toms748_solve(res, lo, hi, r_lo, r_hi, term, max_iter);
    if (evals) *evals = count;
    return 0.5 * (pr.first + pr.second);
}

NodeDiagnostics advance_node(const Model& m, BoundaryState& bs, std::size_t i, const SolverConfig& cfg) {
    if (i == 0 || i != bs.committed() || i >= bs.grid.size()) {
        throw SolverError("advance_node: nodes must be committed in order", static_cast<int>(i));
    }
    TimePoint tp = m.at_tau(bs.grid[i]);
    const double S = m.S_star(), ek = std::exp(m.k());
    NodeDiagnostics d;
    SolverConfig c = cfg;
    double xB = 0.0, Pxx = 0.0;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        int ev = 0;
        xB = solve_xB_node(m, bs, i, c, &ev);
        d.residual_evals += ev;
        Pxx = solve_Pxx_node(m, bs, i, xB);
        d.residual_evals += 1;
        // One alternation sweep: x_B back from the Gamma relation, then the Volterra Gamma again.
        double arg = (tp.r * ek - tp.c.a_v * Pxx / S) / (tp.q + tp.c.a_v);
        double xB_alg = arg > 0.0 ? std::log(arg) : -std::numeric_limits<double>::infinity();
        double Pxx2 = std::isfinite(xB_alg) ? solve_Pxx_node(m, bs, i, xB_alg) : Pxx;
        d.residual_evals += 1;
        d.iterations = it + 1;
        d.residual_xB = std::abs(xB_alg - xB);
        d.residual_Pxx = std::abs(Pxx2 - Pxx) / (1.0 + std::abs(Pxx));
        if (d.residual_xB < cfg.node_tol && d.residual_Pxx < cfg.node_tol) {
            d.converged = true;
            break;
        }
        c.root_tol = std::max(c.root_tol * 0.1, 1e-15);
    }
    if (!d.converged) {
        throw SolverError("node iteration did not converge (x_B residual " + std::to_string(d.residual_xB) +
                              ", Pxx residual " + std::to_string(d.residual_Pxx) + ")",
                          static_cast<int>(i));
    }

    double tau = bs.grid[i];
    double y = xB + tp.f;
    bs.tau.push_back(tau);
    bs.y.push_back(y);
    bs.x_B.push_back(xB);
    bs.Pxx.push_back(Pxx);
    bs.g.push_back(g_value(m, tp, xB));
    double yp = (y - bs.y[i - 1]) / (tau - bs.tau[i - 1]);
    bs.yprime.push_back(yp);
    if (i == 1) bs.yprime[0] = yp;
    bs.h_at.push_back(tp.h);
    bs.psi.push_back((Pxx - S * tp.phi * std::exp(xB)) / tp.h);

    double SB = S * std::exp(xB);
    d.gamma_warning = (Pxx + SB) / (SB * SB) < 0.0;

    detail::ThetaEval te(m, bs, i, detail::node_endpoint(m, bs, i));
    PriceSlice sl = te.tabulate(detail::xi_grid(xB, bs.xi_points, bs.xi_width));
    sl.build_quadrature(cfg.slice_refine);
    bs.slices.push_back(std::move(sl));
    return d;
}

BoundarySolution solve_boundary(const Model& m, const SolverConfig& cfg) {
    BoundarySolution out;
    out.bs = init_node0(m, cfg);
    NodeDiagnostics d0;
    d0.converged = true;
    out.diag.push_back(d0);
    for (std::size_t i = 1; i < out.bs.grid.size(); ++i) {
        out.diag.push_back(advance_node(m, out.bs, i, cfg));
    }
    return out;
}

double boundary_at_t(const Model& m, const BoundaryState& bs, double t) {
    double tau = m.time_change().tau(t);
    if (tau <= 0.0) return m.S_star() * std::exp(m.k());
    std::size_t n = 0;
    detail::Endpoint e = detail::interp_endpoint(m, bs, tau, n);
    return m.S_star() * std::exp(e.x_B);
}

}  // namespace amput
