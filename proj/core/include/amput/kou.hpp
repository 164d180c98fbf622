#pragma once

#include <functional>
#include <vector>

#include "amput/params.hpp"

namespace amput {

struct KouOperatorCoeffs {
    double mu = 0.0;
    double beta = 0.0;
    double kappa = 0.0;
    double theta1 = 2.0;
    double theta2 = 1.0;
};

KouOperatorCoeffs kou_operator_coeffs(const ParamSet& p, double t);

// u = theta1 theta2 P + (theta1 - theta2) P_x - P_xx
double u_from_P(const KouOperatorCoeffs& c, double P, double P_x, double P_xx);

// Solution of theta1 theta2 P + (theta1 - theta2) P' - P'' = f on [x_B, inf) with P(x_B) given
// and P bounded at infinity. Both integrals by adaptive Gauss-Kronrod; the tail integral is
// truncated at x + 40/theta1.
double solve_P_from_u_closed(const KouOperatorCoeffs& c, const std::function<double(double)>& f, double x_B,
                             double P_at_boundary, double x);

// One earlier time s of the Duhamel source, with its quadrature weight in s.
struct KouSourceSlice {
    double s = 0.0;
    double weight = 0.0;
    double kappa = 0.0;
    double beta = 0.0;
    double h = 1.0;
    double f = 0.0;
    double x_B = 0.0;    // lower xi limit at time s
    double xi_max = 0.0; // upper xi limit (P negligible beyond)
    std::function<double(double)> P;
    std::function<double(double)> P_xi;  // used only by the pre-parts form
};

struct KouSourceTarget {
    double tau = 0.0;
    double x = 0.0;
    double x_B = 0.0;
    double f_tau = 0.0;
    double h_tau = 1.0;
    double phi = 0.0;  // exponent of the eta-weight in K1
};

// h(tau) sum_s w/h(s) { int [kappa K1 - beta dK1/dxi] P dxi - beta K1(xi = x_B(s)) P(s, x_B(s)) }
double kou_source_assembly(const std::vector<KouSourceSlice>& slices, const KouSourceTarget& tgt);

// h(tau) sum_s w/h(s) int [kappa P + beta P_xi] K1 dxi, the form before integration by parts.
double kou_source_preparts(const std::vector<KouSourceSlice>& slices, const KouSourceTarget& tgt);

}  // namespace amput
