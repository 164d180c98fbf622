#pragma once

#include <vector>

namespace amput {

// Scaled complementary error function exp(u^2) erfc(u).
double erfcx(double u);

// sign * exp(log_abs); sign is 0 for an exact zero.
struct LogVal {
    double sign = 0.0;
    double log_abs = 0.0;
};

// exp(E) * (erf(u1) - erf(u2)) in sign/log form, accurate when both arguments sit deep in
// the same tail and when u1, u2 nearly coincide.
LogVal log_exp_erf_diff(double E, double u1, double u2);

// Same quantity as a plain double. Uses erfc forms in the tails; adequate whenever exp(E)
// itself is representable.
double exp_erf_diff(double E, double u1, double u2);

// a - b for two values in log form, returned with an optional scale so that
// result = value * exp(log_scale) never overflows.
void log_sub(const LogVal& a, const LogVal& b, double& value, double& log_scale);

// n-point Gauss-Legendre nodes and weights on [-1, 1], ascending.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

// Legendre polynomials P_0..P_{n-1} at s by the three-term recurrence.
void legendre_all(int n, double s, std::vector<double>& out);

}  // namespace amput
