#pragma once

#include <vector>

#include "amput/greens.hpp"

namespace amput {

struct PriceQuery {
    double t = 0.0;
    std::vector<double> S_points;
};

struct PriceResult {
    std::vector<double> prices;
    std::vector<bool> exercised;  // spot at or below the boundary: intrinsic value
    double boundary_value = 0.0;  // S_B(t)
    double ode_residual = 0.0;    // on a small grid just above the boundary
};

// Theta(tau, x): the e^{phi x}-weighted price without the absorbed s = tau term.
double theta_source(const Model& m, const BoundaryState& bs, double tau, double x);

// American Put price at (tau, x). Below the boundary returns the intrinsic value.
double price_at(const Model& m, const BoundaryState& bs, double tau, double x);

PriceResult price_query(const Model& m, const BoundaryState& bs, const PriceQuery& q);

// max over uniform x of |phi P + P_x - h U| / (1 + |h U|), P_x by 4th-order central
// differences. Points within two steps of either end only feed the stencil.
double ode_residual(double phi, const std::vector<double>& x, const std::vector<double>& P,
                    const std::vector<double>& hU);

// The same check on the solved price along x_grid, with two extra stencil points on each side.
double verify_ode_residual(const Model& m, const BoundaryState& bs, double tau, const std::vector<double>& x_grid);

}  // namespace amput
