#pragma once

#include <functional>
#include <vector>

#include "amput/greens.hpp"

namespace amput {

// Exponential Legendre basis on [x_B_ref, inf): E_n(x) = P_n(s), s = 1 - 2 e^{-(x - x_B_ref)/L},
// orthogonal under the weight w(x) = (2/L) e^{-(x - x_B_ref)/L}.
struct ELBasis {
    int N = 12;
    double L = 10.0;
    double x_B_ref = 0.0;
};

double el_map(const ELBasis& b, double x);      // x -> s
double el_unmap(const ELBasis& b, double s);    // s -> x
double el_weight(const ELBasis& b, double x);

double eval_basis(const ELBasis& b, int n, double x);

// alpha_j = (2j + 1)/2 int E_j f w dx by 64-point Gauss-Legendre in s.
std::vector<double> project(const ELBasis& b, const std::function<double(double)>& f);
double reconstruct(const ELBasis& b, const std::vector<double>& alpha, double x);

// max |int E_n E_m w dx - 2 delta_nm/(2n + 1)| over n, m < N.
double orthogonality_defect(const ELBasis& b);

// Collocation system at one committed node for q = e^{phi x} P = sum alpha_j E_j:
//   q(x_c) - c int_{x_B}^{x_c} q = Theta(x_c)
// at the N Gauss-Legendre points of s. The s = tau kernel has been moved to the left.
struct DiscretizedSystem {
    ELBasis basis;
    double phi = 0.0;
    double self_c = 0.0;
    std::vector<double> x_colloc;
    std::vector<double> A;    // row-major N x N
    std::vector<double> rhs;
    // Residual of the boundary equation in x_B at this node (zero at the committed x_B).
    std::function<double(double)> xB_residual;

    std::vector<double> solve() const;  // throws on condition number above 1e14
    double price(const std::vector<double>& alpha, double x) const;
};

DiscretizedSystem assemble_discretized_system(const ELBasis& b, const Model& m, const BoundaryState& bs,
                                              std::size_t node);

}  // namespace amput
