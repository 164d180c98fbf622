#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "amput/params.hpp"

namespace amput {

// Everything the kernels need at one backward time tau.
struct TimePoint {
    double tau = 0.0;
    double t = 0.0;
    double f = 0.0;
    double h = 1.0;
    double r = 0.0;
    double q = 0.0;
    double lam = 0.0;
    double phi = 0.0;
    double dphi = 0.0;  // d phi / dt
    ExpCoeffs c{};
    double aj_tilde() const { return c.a_j / c.a_v; }
};

// Parameters plus time change, with memoised time points. The memo is guarded, so one Model
// can be shared between threads.
class Model {
public:
    explicit Model(ParamSet p, bool memoize = true);

    const ParamSet& params() const { return p_; }
    const TimeChange& time_change() const { return tc_; }
    double k() const { return k_; }
    double S_star() const { return p_.S_star; }

    TimePoint at_tau(double tau) const;
    TimePoint at_tau_uncached(double tau) const;
    TimePoint at_t(double t) const;

private:
    TimePoint make(double tau, double t) const;

    ParamSet p_;
    TimeChange tc_;
    double k_;
    bool memoize_;
    mutable std::mutex mu_;
    mutable std::map<double, TimePoint> memo_;
};

// Put price at one committed node on a one-sided grid above x_B, stored as
// q = e^{phi x} P so that linear interpolation respects the e^{-phi x} tail.
struct PriceSlice {
    double phi = 0.0;
    std::vector<double> x;
    std::vector<double> q;
    // Refined trapezoid nodes over [x.front(), x.back()] and weight * P at each of them.
    std::vector<double> xr;
    std::vector<double> wp;

    double price(double xv) const;
    double x_B() const { return x.front(); }
    void build_quadrature(int refine);
};

// Sequential solution state in backward time. Entries 0..committed()-1 are final.
struct BoundaryState {
    std::vector<double> grid;  // planned tau nodes, grid[0] = 0
    std::vector<double> tau;
    std::vector<double> y;
    std::vector<double> x_B;
    std::vector<double> Pxx;
    std::vector<double> g;
    std::vector<double> yprime;
    std::vector<double> h_at;
    std::vector<double> psi;
    std::vector<PriceSlice> slices;
    int xi_points = 30;
    double xi_width = 40.0;

    std::size_t committed() const { return tau.size(); }
};

// A value split as value * exp(log_scale) to keep large kernels finite.
struct KernelEval {
    double value = 0.0;
    double log_scale = 0.0;
    double get() const;
};

// Boundary data of the heat problem: g = (S_*/h) [phi e^k - (1 + phi) e^{x_B}], the value of
// U = (phi P + P_x)/h on the boundary. At tau = 0 it takes the limit x_B -> k.
double g_boundary(const Model& m, const BoundaryState& bs, double tau);
double g_value(const Model& m, const TimePoint& tp, double x_B);

// Psi = U_z at the boundary of committed node i.
double psi(const Model& m, const BoundaryState& bs, std::size_t i);

// Gamma of the Put at the boundary implied by the pricing equation itself:
// a_v P_xx = S_* [r e^k - (q + a_v) e^{x_B}].
double pxx_boundary_relation(const Model& m, const TimePoint& tp, double x_B);

enum class Quadrature { gauss_legendre, adaptive };

// Homogeneous part of U = u/h at (tau, z), z > y(tau): single- and double-layer heat potentials
// on the moving boundary. tau must lie in the solved range.
double G_interior(const Model& m, const BoundaryState& bs, double tau, double z,
                  Quadrature rule = Quadrature::adaptive);
// Analytic boundary limit, g(tau).
double G_at_boundary(const Model& m, const BoundaryState& bs, double tau);
// Right-hand side of the normal-derivative equation at committed node i; equals Psi(tau_i)
// on a converged solution.
double Gz_at_boundary(const Model& m, const BoundaryState& bs, std::size_t i);

// K1(tau, x, s, xi) = int_{x_B}^{x} e^{phi eta} [Gam(z - zeta) - Gam(z + zeta - 2Y)] d eta,
// z = eta + f(tau), zeta = xi + f(s), Y = x_B + f(tau), Gam the heat kernel over tau - s.
// xi is the log-price at the earlier time s.
struct K1Args {
    double dtau;   // tau - s > 0
    double x;      // upper limit
    double xi;     // source point (log-price at time s)
    double x_B;    // boundary at tau
    double f_tau;
    double f_s;
    double phi;    // phi at tau
};
KernelEval K1_closed(const K1Args& a);
double K1_closed_fast(const K1Args& a);
// d K1 / d xi and d K1 / d x.
double dK1_dxi(const K1Args& a);
double dK1_dx(const K1Args& a);
double K1_at_s_equals_tau(double phi, double x, double xi, double x_B);

// eta-integrals over [x_B, x] of the layer kernels at a quadrature time s.
//   I1 = int e^{phi eta} int_{k}^{inf} e^{w} [e^{-(w - eta - f)^2/4tau} - e^{-(w + eta + f - 2Y)^2/4tau}] dw d eta
//   I2 = int e^{phi eta} [e^{-(eta - a)^2/4D} - e^{-(eta - b)^2/4D}] d eta
//   I3 = int e^{phi eta} [(eta - a) e^{-(eta - a)^2/4D} + (eta - b) e^{-(eta - b)^2/4D}] d eta
// with D = tau - s, a = y(s) - f(tau), b = 2 x_B + f(tau) - y(s).
struct IArgs {
    double tau;
    double x;
    double x_B;
    double f_tau;
    double phi;
    double k;      // y(0)
    double D;      // tau - s (I2, I3)
    double y_s;    // y(s)   (I2, I3)
};
struct IValues {
    double I1;
    double I2;
    double I3;
};
IValues I_integrals(const IArgs& a);

// -S_* e^{-f}/(2 sqrt(pi tau)) int_{k}^{inf} [e^{-(w - z)^2/4tau} - e^{-(w + z - 2Y)^2/4tau}] dw
double gamma_integral_closed(double S_star, double f_tau, double tau, double z, double y_tau, double k);

}  // namespace amput
