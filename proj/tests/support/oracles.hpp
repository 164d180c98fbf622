#pragma once

// Brute-force quadrature of the kernel definitions, independent of the closed forms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "amput/greens.hpp"

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

// Composite 30-point Gauss-Legendre over [a, b], split at the cuts and into pieces no wider than hmax.
inline double integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts,
                        double hmax) {
    if (!(b > a)) return 0.0;
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
        if (!(hi > lo)) continue;
        int n = static_cast<int>(std::ceil((hi - lo) / hmax));
        double d = (hi - lo) / n;
        for (int j = 0; j < n; ++j) {
            s += boost::math::quadrature::gauss<double, 30>::integrate(f, lo + j * d, lo + (j + 1) * d);
        }
    }
    return s;
}

// Cut points around a Gaussian of half-width w centred at c.
inline std::vector<double> gauss_cuts(double c, double w) {
    return {c - 8.0 * w, c - 2.0 * w, c, c + 2.0 * w, c + 8.0 * w};
}

inline double heat(double u, double D) {
    return std::exp(-u * u / (4.0 * D)) / (2.0 * std::sqrt(kPi * D));
}

// int_{x_B}^{x} e^{phi eta} [Gam(z - zeta) - Gam(z + zeta - 2Y)] d eta
inline double K1(const amput::K1Args& a) {
    double zeta = a.xi + a.f_s, Y = a.x_B + a.f_tau;
    auto f = [&](double eta) {
        double z = eta + a.f_tau;
        return std::exp(a.phi * eta) * (heat(z - zeta, a.dtau) - heat(z + zeta - 2.0 * Y, a.dtau));
    };
    double w = std::sqrt(a.dtau);
    auto c = gauss_cuts(zeta - a.f_tau, w);
    auto c2 = gauss_cuts(2.0 * Y - zeta - a.f_tau, w);
    c.insert(c.end(), c2.begin(), c2.end());
    return integrate(f, a.x_B, a.x, c, 0.5 * w);
}

// Absolute scale of the K1 integrand, used to express cancellation-limited accuracy.
inline double K1_l1(const amput::K1Args& a) {
    double zeta = a.xi + a.f_s, Y = a.x_B + a.f_tau;
    auto f = [&](double eta) {
        double z = eta + a.f_tau;
        return std::exp(a.phi * eta) * (heat(z - zeta, a.dtau) + heat(z + zeta - 2.0 * Y, a.dtau));
    };
    double w = std::sqrt(a.dtau);
    auto c = gauss_cuts(zeta - a.f_tau, w);
    auto c2 = gauss_cuts(2.0 * Y - zeta - a.f_tau, w);
    c.insert(c.end(), c2.begin(), c2.end());
    return integrate(f, a.x_B, a.x, c, 0.5 * w);
}

// int_k^inf e^w e^{-(w - m)^2/4 tau} dw
inline double inner_w(double m, double tau, double k) {
    double w = std::sqrt(tau), c = m + 2.0 * tau;
    double hi = std::max(k, c) + 40.0 * w;
    auto f = [&](double v) { return std::exp(v - (v - m) * (v - m) / (4.0 * tau)); };
    return integrate(f, k, hi, gauss_cuts(c, w), 0.5 * w);
}

inline amput::IValues I_integrals(const amput::IArgs& a) {
    const double Y = a.x_B + a.f_tau;
    amput::IValues out{};
    auto f1 = [&](double eta) {
        double m1 = eta + a.f_tau, m2 = 2.0 * Y - eta - a.f_tau;
        return std::exp(a.phi * eta) * (inner_w(m1, a.tau, a.k) - inner_w(m2, a.tau, a.k));
    };
    out.I1 = integrate(f1, a.x_B, a.x, {}, 0.5 * std::sqrt(a.tau));
    const double ca = a.y_s - a.f_tau, cb = 2.0 * a.x_B + a.f_tau - a.y_s, D = a.D;
    auto ga = [&](double eta) { return std::exp(-(eta - ca) * (eta - ca) / (4.0 * D)); };
    auto gb = [&](double eta) { return std::exp(-(eta - cb) * (eta - cb) / (4.0 * D)); };
    auto cuts = gauss_cuts(ca, std::sqrt(D));
    auto cb_cuts = gauss_cuts(cb, std::sqrt(D));
    cuts.insert(cuts.end(), cb_cuts.begin(), cb_cuts.end());
    out.I2 = integrate([&](double eta) { return std::exp(a.phi * eta) * (ga(eta) - gb(eta)); }, a.x_B, a.x, cuts,
                       0.5 * std::sqrt(D));
    out.I3 = integrate([&](double eta) { return std::exp(a.phi * eta) * ((eta - ca) * ga(eta) + (eta - cb) * gb(eta)); },
                       a.x_B, a.x, cuts, 0.5 * std::sqrt(D));
    return out;
}

// -S_* e^{-f}/(2 sqrt(pi tau)) int_k^inf [e^{-(w - z)^2/4tau} - e^{-(w + z - 2Y)^2/4tau}] dw
inline double gamma_integral(double S, double f, double tau, double z, double Y, double k) {
    double w = std::sqrt(tau);
    auto g = [&](double v) {
        return std::exp(-(v - z) * (v - z) / (4.0 * tau)) - std::exp(-(v + z - 2.0 * Y) * (v + z - 2.0 * Y) / (4.0 * tau));
    };
    double hi = std::max({k, z, 2.0 * Y - z}) + 60.0 * w;
    auto cuts = gauss_cuts(z, w);
    auto c2 = gauss_cuts(2.0 * Y - z, w);
    cuts.insert(cuts.end(), c2.begin(), c2.end());
    return -S * std::exp(-f) / (2.0 * std::sqrt(kPi * tau)) * integrate(g, k, hi, cuts, 0.5 * w);
}

// Random admissible K1 arguments.
inline amput::K1Args random_k1(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    amput::K1Args a{};
    a.dtau = std::exp(std::log(1e-3) + U(rng) * std::log(200.0));  // [1e-3, 0.2]
    a.x_B = -U(rng);
    a.x = a.x_B + 0.01 + 2.5 * U(rng);
    a.f_tau = 0.4 * (U(rng) - 0.5);
    a.f_s = a.f_tau - 0.1 * U(rng);
    a.xi = a.x_B + 0.05 + 2.5 * U(rng);
    a.phi = 0.05 + 1.5 * U(rng);
    return a;
}

inline amput::IArgs random_i(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    amput::IArgs a{};
    a.tau = 0.01 + 0.2 * U(rng);
    a.k = 0.0;
    a.x_B = -0.8 * U(rng) - 0.02;
    a.x = a.x_B + 0.01 + 2.0 * U(rng);
    a.f_tau = 0.2 * (U(rng) - 0.5);
    a.phi = 0.05 + 1.0 * U(rng);
    a.D = a.tau * (0.02 + 0.9 * U(rng));
    a.y_s = a.x_B + a.f_tau + 0.3 * U(rng);
    return a;
}

}  // namespace oracle
