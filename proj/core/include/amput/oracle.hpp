#pragma once

#include <vector>

#include "amput/params.hpp"

namespace amput {

enum class OptionType { put, call };

struct TreeConfig {
    int steps = 400;
    double r = 0.0;
    double q = 0.0;
    double sigma = 0.2;
    double T = 1.0;
    double K = 1.0;
};

// Trinomial lattice on a fixed log-price grid centred at K, so one run prices every spot.
struct TreeResult {
    std::vector<double> S;       // spot nodes
    std::vector<double> V0;      // values at t = 0
    std::vector<double> times;   // t of each level, ascending, last is T
    std::vector<double> boundary;
    double dx = 0.0;
    double price(double spot) const;
};

TreeResult tree_american(const TreeConfig& cfg, OptionType type);

struct FDConfig {
    double x_lo = -8.0;  // offsets from k
    double x_hi = 8.0;
    int Nx = 400;
    int Nt = 400;
    double penalty = 1e6;
    int rannacher_steps = 2;
    bool american = true;
};

// Put on the log grid x = ln(S/S_*), all time levels kept.
struct FDResult {
    double S_star = 1.0;
    std::vector<double> x;
    std::vector<double> times;  // descending from T to 0
    std::vector<std::vector<double>> V;
    std::vector<double> boundary;  // S_B at each level (NaN when no exercise)
    double penalty_residual = 0.0;

    double price(double spot) const;  // t = 0
    double price_at(double t, double spot) const;
    double boundary_at(double t) const;
};

FDResult fd_pide_american(const FDConfig& cfg, const ParamSet& p);

}  // namespace amput
