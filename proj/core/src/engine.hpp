#pragma once

#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "amput/greens.hpp"

namespace amput::detail {

// Adaptive Gauss-Kronrod over [a, b] rescaled to [0, 1]. Boost compares the error of the unscaled
// rule with the scaled estimate, so narrow intervals would otherwise never meet the tolerance.
template <class F>
double integrate_adaptive(F&& f, double a, double b, unsigned depth, double tol) {
    const double L = b - a;
    if (!(L > 0.0)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double t) { return L * f(a + L * t); }, 0.0, 1.0, depth, tol);
}

// Boundary values at the newest time of an s-integral. History nodes 0..n-1 come from the
// BoundaryState; the endpoint plays the role of node n.
struct Endpoint {
    double tau = 0.0;
    double y = 0.0;
    double x_B = 0.0;
    double psi = 0.0;
    TimePoint tp;
};

// Interpolated boundary data at one quadrature time s.
struct Layer {
    double s = 0.0;
    double w = 0.0;
    TimePoint tp;
    double y = 0.0;
    double yp = 0.0;
    double psi_hist = 0.0;  // Psi(s) with the endpoint value set to zero
    double shape_e = 0.0;   // d Psi(s) / d Psi_e
    double x_B = 0.0;
    double g = 0.0;
    double gp = 0.0;        // dg/ds along the boundary

    double psi(double psi_e) const { return psi_hist + shape_e * psi_e; }
};

// Quadrature times and weights over [0, tau_e] on the history nodes plus the endpoint.
struct SRule {
    std::vector<double> s;
    std::vector<double> w;
};
SRule s_rule(const std::vector<double>& taus, std::size_t n, double tau_e);

// Boundary data at arbitrary s in [0, tau_e].
Layer layer_at(const Model& m, const BoundaryState& bs, std::size_t n, const Endpoint& e, double s,
               const TimePoint& tp);

std::vector<Layer> build_layers(const Model& m, const BoundaryState& bs, std::size_t n, const Endpoint& e);

Endpoint make_endpoint(const Model& m, double tau, double x_B, double psi);
// Endpoint of committed node i (history i).
Endpoint node_endpoint(const Model& m, const BoundaryState& bs, std::size_t i);
// Endpoint at any tau in the committed range; n receives the history length.
Endpoint interp_endpoint(const Model& m, const BoundaryState& bs, double tau, std::size_t& n);

// Normal-derivative equation Psi_e = R0 + We * Psi_e (J_z included in R0).
struct NeumannParts {
    double R0 = 0.0;
    double We = 0.0;
    double jz = 0.0;
};
NeumannParts neumann_parts(const Model& m, const BoundaryState& bs, std::size_t n, const Endpoint& e,
                           const std::vector<Layer>& layers);

// z-derivative at the boundary of the Duhamel term over past price slices.
double jz_term(const Model& m, const BoundaryState& bs, std::size_t n, const Endpoint& e);

// Theta(tau_e, x) = e^{phi x} P - (self term), and the matching U pieces, for one endpoint.
class ThetaEval {
public:
    ThetaEval(const Model& m, const BoundaryState& bs, std::size_t n, const Endpoint& e);

    double x_B() const { return e_.x_B; }
    double phi() const { return e_.tp.phi; }
    // Coefficient of the absorbed s = tau term: q' - c q = Theta_r' with q = e^{phi x} P.
    double self_c() const { return c_; }

    double theta_r(double x) const;
    // Homogeneous U by the shared Gauss-Legendre rule.
    double u_layers(double x) const;
    // Duhamel U over past slices, without the self term.
    double u_jump(double x) const;
    // Full U given P(tau_e, x).
    double u_total(double x, double P) const;

    // e^{phi x} P(tau_e, x) by adaptive quadrature of the absorbed term.
    double q_at(double x) const;
    double price(double x) const;
    // Prices at ascending points, integrating the absorbed term cell by cell.
    std::vector<double> prices(const std::vector<double>& xs) const;

    // Price slice on the xi-grid (q = e^{phi x} P), integrated cell by cell.
    PriceSlice tabulate(const std::vector<double>& xg) const;

private:
    double boundary_layer_fix(double x, bool deriv) const;

    struct LayerK {
        double w, mu, g, a, b, D, sq, Ea, Eb, lo_a, lo_b, Gd;
    };
    struct JNode {
        double cw, c1, c2, D, sq, E1, E2, lo1, lo2;
    };
    double base_ = 0.0;
    double c_ = 0.0;
    // Last s-interval [tau_e - delta_, tau_e] and its layers, for boundary_layer_fix.
    double delta_ = 0.0;
    double g_end_ = 0.0;
    std::vector<std::size_t> last_;
    Endpoint e_;
    std::vector<LayerK> lk_;
    std::vector<JNode> jn_;
};

std::vector<double> xi_grid(double x_B, int points, double width);

}  // namespace amput::detail
