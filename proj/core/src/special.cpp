#include "amput/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

namespace amput {

namespace {

constexpr double kInvSqrtPi = 0.56418958354775628695;

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGL8x = {0.18343464249564980494, 0.52553240991632898582,
                                         0.79666647741362673959, 0.96028985649753623168};
constexpr std::array<double, 4> kGL8w = {0.36268378337836198297, 0.31370664587788728734,
                                         0.22238103445337447054, 0.10122853629037625915};

// log erfc(u) for u >= 0.
double log_erfc_pos(double u) {
    return -u * u + std::log(erfcx(u));
}

}  // namespace

double erfcx(double u) {
    if (u < 0.0) {
        return 2.0 * std::exp(u * u) - erfcx(-u);
    }
    if (u < 25.0) {
        return std::exp(u * u) * std::erfc(u);
    }
    // Asymptotic series; at u >= 25 six terms are far below double precision.
    double x2 = 1.0 / (2.0 * u * u);
    double term = 1.0, sum = 1.0;
    for (int n = 1; n <= 6; ++n) {
        term *= -(2.0 * n - 1.0) * x2;
        sum += term;
    }
    return sum * kInvSqrtPi / u;
}

LogVal log_exp_erf_diff(double E, double u1, double u2) {
    double d = u1 - u2;
    if (d == 0.0) return {0.0, 0.0};
    double m = 0.5 * (u1 + u2);
    double a = 0.5 * d;
    if (std::abs(d) * std::max(1.0, std::abs(m)) < 0.5) {
        // erf(u1) - erf(u2) = 2/sqrt(pi) e^{-m^2} int_{-a}^{a} e^{-2 m v - v^2} dv
        double s = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            double v = a * kGL8x[i];
            s += kGL8w[i] * (std::exp(-2.0 * m * v - v * v) + std::exp(2.0 * m * v - v * v));
        }
        s *= a * 2.0 * kInvSqrtPi;
        return {s > 0.0 ? 1.0 : -1.0, E - m * m + std::log(std::abs(s))};
    }
    if (u1 >= 0.0 && u2 >= 0.0) {
        // erfc(u2) - erfc(u1)
        double t1 = log_erfc_pos(u1), t2 = log_erfc_pos(u2);
        if (t2 > t1) return {1.0, E + t2 + std::log(-std::expm1(t1 - t2))};
        return {-1.0, E + t1 + std::log(-std::expm1(t2 - t1))};
    }
    if (u1 <= 0.0 && u2 <= 0.0) {
        LogVal r = log_exp_erf_diff(E, -u1, -u2);
        r.sign = -r.sign;
        return r;
    }
    double v = std::erf(u1) - std::erf(u2);
    return {v > 0.0 ? 1.0 : -1.0, E + std::log(std::abs(v))};
}

double exp_erf_diff(double E, double u1, double u2) {
    if (u1 == u2) return 0.0;
    if (u1 > 3.0 && u2 > 3.0) {
        return std::exp(E) * (std::erfc(u2) - std::erfc(u1));
    }
    if (u1 < -3.0 && u2 < -3.0) {
        return std::exp(E) * (std::erfc(-u1) - std::erfc(-u2));
    }
    return std::exp(E) * (std::erf(u1) - std::erf(u2));
}

void log_sub(const LogVal& a, const LogVal& b, double& value, double& log_scale) {
    if (a.sign == 0.0 && b.sign == 0.0) {
        value = 0.0;
        log_scale = 0.0;
        return;
    }
    double mx;
    if (a.sign == 0.0) mx = b.log_abs;
    else if (b.sign == 0.0) mx = a.log_abs;
    else mx = std::max(a.log_abs, b.log_abs);
    double v = 0.0;
    if (a.sign != 0.0) v += a.sign * std::exp(a.log_abs - mx);
    if (b.sign != 0.0) v -= b.sign * std::exp(b.log_abs - mx);
    if (mx <= 700.0) {
        value = v * std::exp(mx);
        log_scale = 0.0;
    } else {
        value = v;
        log_scale = mx;
    }
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule r;
    r.x.assign(n, 0.0);
    r.w.assign(n, 0.0);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p1 = z, p0 = 1.0;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(r)).first->second;
}

void legendre_all(int n, double s, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(std::max(n, 0)), 0.0);
    if (n <= 0) return;
    out[0] = 1.0;
    if (n > 1) out[1] = s;
    for (int j = 1; j + 1 < n; ++j) {
        out[j + 1] = ((2.0 * j + 1.0) * s * out[j] - j * out[j - 1]) / (j + 1.0);
    }
}

}  // namespace amput
