#include "amput/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "amput/volterra.hpp"
#include "engine.hpp"

namespace amput {

namespace {

double intrinsic(const Model& m, double x) {
    return std::max(m.params().K - m.S_star() * std::exp(x), 0.0);
}

}  // namespace

double theta_source(const Model& m, const BoundaryState& bs, double tau, double x) {
    std::size_t n = 0;
    detail::Endpoint e = detail::interp_endpoint(m, bs, tau, n);
    if (x < e.x_B) throw std::domain_error("theta_source: x below the boundary");
    return detail::ThetaEval(m, bs, n, e).theta_r(x);
}

double price_at(const Model& m, const BoundaryState& bs, double tau, double x) {
    if (tau <= 0.0) return intrinsic(m, x);
    std::size_t n = 0;
    detail::Endpoint e = detail::interp_endpoint(m, bs, tau, n);
    if (x <= e.x_B) return m.S_star() * (std::exp(m.k()) - std::exp(x));
    return detail::ThetaEval(m, bs, n, e).price(x);
}

PriceResult price_query(const Model& m, const BoundaryState& bs, const PriceQuery& q) {
    for (double S : q.S_points) {
        if (!(S > 0.0)) throw std::invalid_argument("spot prices must be positive");
    }
    PriceResult r;
    double tau = m.time_change().tau(q.t);
    if (tau <= 0.0) {
        r.boundary_value = m.S_star() * std::exp(m.k());
        for (double S : q.S_points) {
            double x = std::log(S / m.S_star());
            r.prices.push_back(intrinsic(m, x));
            r.exercised.push_back(S <= r.boundary_value);
        }
        return r;
    }
    std::size_t n = 0;
    detail::Endpoint e = detail::interp_endpoint(m, bs, tau, n);
    detail::ThetaEval te(m, bs, n, e);
    r.boundary_value = m.S_star() * std::exp(e.x_B);
    std::vector<std::size_t> order(q.S_points.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return q.S_points[a] < q.S_points[b]; });
    std::vector<double> xs;
    for (std::size_t j : order) xs.push_back(std::log(q.S_points[j] / m.S_star()));
    std::vector<double> ps = te.prices(xs);
    r.prices.assign(order.size(), 0.0);
    r.exercised.assign(order.size(), false);
    for (std::size_t j = 0; j < order.size(); ++j) {
        bool ex = xs[j] <= e.x_B;
        r.exercised[order[j]] = ex;
        r.prices[order[j]] = ex ? m.params().K - q.S_points[order[j]] : ps[j];
    }
    std::vector<double> xg;
    for (int j = 0; j < 41; ++j) xg.push_back(e.x_B + 0.1 + 0.0025 * j);
    r.ode_residual = verify_ode_residual(m, bs, tau, xg);
    return r;
}

double ode_residual(double phi, const std::vector<double>& x, const std::vector<double>& P,
                    const std::vector<double>& hU) {
    if (x.size() < 5 || P.size() != x.size() || hU.size() != x.size()) {
        throw std::invalid_argument("ode_residual: need at least 5 matching samples");
    }
    const double dx = x[1] - x[0];
    double worst = 0.0;
    for (std::size_t j = 2; j + 2 < x.size(); ++j) {
        double Px = (P[j - 2] - 8.0 * P[j - 1] + 8.0 * P[j + 1] - P[j + 2]) / (12.0 * dx);
        worst = std::max(worst, std::abs(phi * P[j] + Px - hU[j]) / (1.0 + std::abs(hU[j])));
    }
    return worst;
}

double verify_ode_residual(const Model& m, const BoundaryState& bs, double tau, const std::vector<double>& x_grid) {
    if (x_grid.size() < 5) throw std::invalid_argument("verify_ode_residual: need at least 5 grid points");
    double dx = x_grid[1] - x_grid[0];
    for (std::size_t j = 1; j < x_grid.size(); ++j) {
        if (std::abs((x_grid[j] - x_grid[j - 1]) - dx) > 1e-9 * std::max(1.0, std::abs(dx))) {
            throw std::invalid_argument("verify_ode_residual: grid must be uniform");
        }
    }
    std::size_t n = 0;
    detail::Endpoint e = detail::interp_endpoint(m, bs, tau, n);
    if (!(x_grid.front() > e.x_B)) throw std::invalid_argument("verify_ode_residual: grid must lie above x_B");
    detail::ThetaEval te(m, bs, n, e);

    // Extend by two points on each side where that stays in the continuation region.
    std::vector<double> xs;
    for (int k = 2; k >= 1; --k) {
        double x = x_grid.front() - k * dx;
        if (x > e.x_B) xs.push_back(x);
    }
    xs.insert(xs.end(), x_grid.begin(), x_grid.end());
    xs.push_back(x_grid.back() + dx);
    xs.push_back(x_grid.back() + 2.0 * dx);
    std::vector<double> P = te.prices(xs);

    std::vector<double> hU(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) hU[j] = e.tp.h * te.u_total(xs[j], P[j]);
    return ode_residual(e.tp.phi, xs, P, hU);
}

}  // namespace amput
