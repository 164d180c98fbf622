#include "amput/collocation.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include <Eigen/Dense>

#include "amput/special.hpp"
#include "amput/volterra.hpp"
#include "engine.hpp"

namespace amput {

namespace {

constexpr int kProjectionNodes = 64;
constexpr int kColumnNodes = 32;
constexpr double kMaxCondition = 1e14;

void check_basis(const ELBasis& b) {
    if (b.N < 1) throw std::invalid_argument("ELBasis: N must be positive");
    if (!(b.L > 0.0)) throw std::invalid_argument("ELBasis: L must be positive");
}

}  // namespace

double el_map(const ELBasis& b, double x) {
    return 1.0 - 2.0 * std::exp(-(x - b.x_B_ref) / b.L);
}

double el_unmap(const ELBasis& b, double s) {
    return b.x_B_ref - b.L * std::log(0.5 * (1.0 - s));
}

double el_weight(const ELBasis& b, double x) {
    return 2.0 / b.L * std::exp(-(x - b.x_B_ref) / b.L);
}

double eval_basis(const ELBasis& b, int n, double x) {
    check_basis(b);
    if (n < 0 || n >= b.N) throw std::out_of_range("eval_basis: index outside [0, N)");
    std::vector<double> P;
    legendre_all(n + 1, el_map(b, x), P);
    return P[static_cast<std::size_t>(n)];
}

std::vector<double> project(const ELBasis& b, const std::function<double(double)>& f) {
    check_basis(b);
    const GaussRule& gr = gauss_legendre(kProjectionNodes);
    std::vector<double> alpha(static_cast<std::size_t>(b.N), 0.0);
    std::vector<double> P;
    for (std::size_t q = 0; q < gr.x.size(); ++q) {
        double fx = f(el_unmap(b, gr.x[q]));
        if (!std::isfinite(fx)) throw std::domain_error("project: non-finite integrand sample");
        legendre_all(b.N, gr.x[q], P);
        for (int j = 0; j < b.N; ++j) alpha[static_cast<std::size_t>(j)] += gr.w[q] * P[static_cast<std::size_t>(j)] * fx;
    }
    for (int j = 0; j < b.N; ++j) alpha[static_cast<std::size_t>(j)] *= (2.0 * j + 1.0) / 2.0;
    return alpha;
}

double reconstruct(const ELBasis& b, const std::vector<double>& alpha, double x) {
    std::vector<double> P;
    legendre_all(static_cast<int>(alpha.size()), el_map(b, x), P);
    double s = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) s += alpha[j] * P[j];
    return s;
}

double orthogonality_defect(const ELBasis& b) {
    check_basis(b);
    const GaussRule& gr = gauss_legendre(kProjectionNodes);
    std::vector<double> P;
    double worst = 0.0;
    for (int n = 0; n < b.N; ++n) {
        for (int m = 0; m < b.N; ++m) {
            double s = 0.0;
            for (std::size_t q = 0; q < gr.x.size(); ++q) {
                // dx w(x) = ds, so the x-integral is a plain Legendre moment in s.
                legendre_all(b.N, gr.x[q], P);
                s += gr.w[q] * P[static_cast<std::size_t>(n)] * P[static_cast<std::size_t>(m)];
            }
            double exact = n == m ? 2.0 / (2.0 * n + 1.0) : 0.0;
            worst = std::max(worst, std::abs(s - exact));
        }
    }
    return worst;
}

std::vector<double> DiscretizedSystem::solve() const {
    const int N = basis.N;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(A.data(), N, N);
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), N);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (!(cond <= kMaxCondition)) throw std::runtime_error("collocation system is singular (condition estimate " + std::to_string(cond) + ")");
    Eigen::VectorXd a = M.colPivHouseholderQr().solve(b);
    return std::vector<double>(a.data(), a.data() + N);
}

double DiscretizedSystem::price(const std::vector<double>& alpha, double x) const {
    return std::exp(-phi * x) * reconstruct(basis, alpha, x);
}

DiscretizedSystem assemble_discretized_system(const ELBasis& b, const Model& m, const BoundaryState& bs,
                                              std::size_t node) {
    check_basis(b);
    detail::Endpoint e = detail::node_endpoint(m, bs, node);
    detail::ThetaEval te(m, bs, node, e);
    DiscretizedSystem sys;
    sys.basis = b;
    sys.basis.x_B_ref = e.x_B;
    sys.phi = e.tp.phi;
    sys.self_c = te.self_c();
    const int N = b.N;
    const GaussRule& gc = gauss_legendre(N);
    const GaussRule& gi = gauss_legendre(kColumnNodes);
    sys.A.assign(static_cast<std::size_t>(N * N), 0.0);
    sys.rhs.assign(static_cast<std::size_t>(N), 0.0);
    std::vector<double> Pc, Pq;
    for (int c = 0; c < N; ++c) {
        double sc = gc.x[static_cast<std::size_t>(c)];
        double xc = el_unmap(sys.basis, sc);
        sys.x_colloc.push_back(xc);
        legendre_all(N, sc, Pc);
        // int_{x_B}^{x_c} E_j dx = int_{-1}^{s_c} P_j(s) L/(1 - s) ds
        std::vector<double> col(static_cast<std::size_t>(N), 0.0);
        double half = 0.5 * (sc + 1.0);
        for (std::size_t q = 0; q < gi.x.size(); ++q) {
            double s = -1.0 + half * (gi.x[q] + 1.0);
            legendre_all(N, s, Pq);
            double w = gi.w[q] * half * b.L / (1.0 - s);
            for (int j = 0; j < N; ++j) col[static_cast<std::size_t>(j)] += w * Pq[static_cast<std::size_t>(j)];
        }
        for (int j = 0; j < N; ++j) {
            sys.A[static_cast<std::size_t>(c * N + j)] =
                Pc[static_cast<std::size_t>(j)] - sys.self_c * col[static_cast<std::size_t>(j)];
        }
        sys.rhs[static_cast<std::size_t>(c)] = te.theta_r(xc);
    }

    auto hist = std::make_shared<BoundaryState>(bs);
    hist->tau.resize(node);
    hist->y.resize(node);
    hist->x_B.resize(node);
    hist->Pxx.resize(node);
    hist->g.resize(node);
    hist->yprime.resize(node);
    hist->h_at.resize(node);
    hist->psi.resize(node);
    hist->slices.resize(node);
    const Model* mp = &m;
    TimePoint tp = e.tp;
    sys.xB_residual = [hist, mp, node, tp](double x) {
        return solve_Pxx_node(*mp, *hist, node, x) - pxx_boundary_relation(*mp, tp, x);
    };
    return sys;
}

}  // namespace amput
