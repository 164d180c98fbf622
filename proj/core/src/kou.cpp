#include "amput/kou.hpp"

#include <cmath>
#include <stdexcept>

#include "amput/greens.hpp"
#include "engine.hpp"

namespace amput {

namespace {

using detail::integrate_adaptive;
constexpr double kRelTol = 1e-11;
constexpr double kTailWidth = 40.0;

template <class F>
double integrate_split(F&& f, double a, double b, double cut) {
    if (!(b > a)) return 0.0;
    if (cut > a && cut < b) {
        return integrate_adaptive(f, a, cut, 15, kRelTol) + integrate_adaptive(f, cut, b, 15, kRelTol);
    }
    return integrate_adaptive(f, a, b, 15, kRelTol);
}

K1Args k1_args(const KouSourceTarget& t, const KouSourceSlice& s, double xi) {
    return K1Args{t.tau - s.s, t.x, xi, t.x_B, t.f_tau, s.f, t.phi};
}

// xi where the direct kernel is centred on the upper eta-limit.
double kernel_centre(const KouSourceTarget& t, const KouSourceSlice& s) {
    return t.x + t.f_tau - s.f;
}

}  // namespace

KouOperatorCoeffs kou_operator_coeffs(const ParamSet& p, double t) {
    KouCoeffs k = coeffs_kou(p, t);
    KouOperatorCoeffs c;
    c.mu = k.mu;
    c.beta = k.beta;
    c.kappa = k.kappa;
    c.theta1 = p.kou->theta1.value(t);
    c.theta2 = p.kou->theta2.value(t);
    return c;
}

double u_from_P(const KouOperatorCoeffs& c, double P, double P_x, double P_xx) {
    return c.theta1 * c.theta2 * P + (c.theta1 - c.theta2) * P_x - P_xx;
}

double solve_P_from_u_closed(const KouOperatorCoeffs& c, const std::function<double(double)>& f, double x_B,
                             double P_at_boundary, double x) {
    const double t1 = c.theta1, t2 = c.theta2;
    if (!(t1 > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("theta1 and theta2 must be positive");
    if (x < x_B) throw std::domain_error("x below the boundary");
    const double span = kTailWidth / t1;
    // int_a^inf e^{theta1 (a - k)} f(k) dk, truncated.
    auto tail = [&](double a) {
        double ft = f(a + span);
        if (!std::isfinite(ft) || std::abs(ft) * std::exp(-kTailWidth) > 1e-12 * (1.0 + std::abs(f(a)))) {
            throw std::invalid_argument("source does not decay fast enough for the truncated tail integral");
        }
        return integrate_adaptive([&](double k) { return std::exp(t1 * (a - k)) * f(k); }, a, a + span, 15, kRelTol);
    };
    double decay = std::exp(-t2 * (x - x_B));
    double mid = x > x_B
                     ? integrate_adaptive([&](double k) { return std::exp(t2 * (k - x)) * f(k); }, x_B, x, 15, kRelTol)
                     : 0.0;
    return decay * P_at_boundary + (tail(x) - decay * tail(x_B) + mid) / (t1 + t2);
}

double kou_source_assembly(const std::vector<KouSourceSlice>& slices, const KouSourceTarget& tgt) {
    double total = 0.0;
    for (const auto& s : slices) {
        if (s.weight == 0.0) continue;
        if (!(s.s < tgt.tau)) throw std::domain_error("kou source slices must precede tau");
        auto integrand = [&](double xi) {
            K1Args a = k1_args(tgt, s, xi);
            double k1 = s.kappa != 0.0 ? K1_closed_fast(a) : 0.0;
            double dk = s.beta != 0.0 ? dK1_dxi(a) : 0.0;
            return (s.kappa * k1 - s.beta * dk) * s.P(xi);
        };
        double v = integrate_split(integrand, s.x_B, s.xi_max, kernel_centre(tgt, s));
        if (s.beta != 0.0) v -= s.beta * K1_closed_fast(k1_args(tgt, s, s.x_B)) * s.P(s.x_B);
        total += s.weight / s.h * v;
    }
    return tgt.h_tau * total;
}

double kou_source_preparts(const std::vector<KouSourceSlice>& slices, const KouSourceTarget& tgt) {
    double total = 0.0;
    for (const auto& s : slices) {
        if (s.weight == 0.0) continue;
        if (!(s.s < tgt.tau)) throw std::domain_error("kou source slices must precede tau");
        auto integrand = [&](double xi) {
            double src = s.kappa * s.P(xi) + (s.beta != 0.0 ? s.beta * s.P_xi(xi) : 0.0);
            return src * K1_closed_fast(k1_args(tgt, s, xi));
        };
        total += s.weight / s.h * integrate_split(integrand, s.x_B, s.xi_max, kernel_centre(tgt, s));
    }
    return tgt.h_tau * total;
}

}  // namespace amput
