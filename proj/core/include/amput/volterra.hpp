#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "amput/greens.hpp"

namespace amput {

enum class GridKind { uniform, refined };

const char* to_string(GridKind g);
GridKind grid_kind_from_string(const std::string& s);

struct SolverConfig {
    int M = 20;
    double node_tol = 1e-8;
    int max_iters = 50;
    double root_tol = 1e-10;
    // refined places tau_i = tau_max (i/M)^2, denser near expiry.
    GridKind grid = GridKind::refined;
    int xi_points = 30;
    double xi_trunc = 4.0;  // multiple of L
    double L = 10.0;
    int slice_refine = 8;
    // Run even when lambda == 0 and phi is constant (validation only).
    bool allow_no_jump = false;

    void validate() const;
};

struct NodeDiagnostics {
    int iterations = 0;
    double residual_xB = 0.0;
    double residual_Pxx = 0.0;
    bool converged = false;
    int residual_evals = 0;
    // S-space Gamma (P_xx + S_B)/S_B^2 came out negative.
    bool gamma_warning = false;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int node) : std::runtime_error(what), node_(node) {}
    int node() const { return node_; }

private:
    int node_;
};

// Raised for lambda == 0 with constant phi, where the jump coupling vanishes.
class SingularLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<double> tau_grid(const SolverConfig& cfg, double tau_max);

BoundaryState init_node0(const Model& m, const SolverConfig& cfg);

// P_xx at the boundary implied by the normal-derivative Volterra equation for a trial x_B.
double solve_Pxx_node(const Model& m, const BoundaryState& bs, std::size_t i, double x_B);

// x_B at node i: root of solve_Pxx_node(x_B) - pxx_boundary_relation(x_B), bracketed below
// x_B(tau_{i-1}).
double solve_xB_node(const Model& m, const BoundaryState& bs, std::size_t i, const SolverConfig& cfg,
                     int* evals = nullptr);

// Solves, verifies and commits node i (including its price slice).
NodeDiagnostics advance_node(const Model& m, BoundaryState& bs, std::size_t i, const SolverConfig& cfg);

struct BoundarySolution {
    BoundaryState bs;
    std::vector<NodeDiagnostics> diag;
};

BoundarySolution solve_boundary(const Model& m, const SolverConfig& cfg);

// S_B at calendar time t, interpolated consistently with the solver's boundary shape.
double boundary_at_t(const Model& m, const BoundaryState& bs, double t);

}  // namespace amput
