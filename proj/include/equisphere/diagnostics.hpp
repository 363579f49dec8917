#pragma once

#include <Eigen/Dense>
#include <vector>

#include "equisphere/sem.hpp"

namespace eqs {

using SparseMatC = Eigen::SparseMatrix<std::complex<double>>;

/// Decomposition of one edge-weight change between consecutive iterates
/// into per-vertex displacement terms:
/// w_new - w_old = c_i eps_i - c_l eps_l + c_j eps_j - c_r eps_r.
struct WeightDelta {
    int edge = -1;
    double w_new = 0.0;
    double w_old = 0.0;
    Complex c_i, c_l, c_j, c_r;
    Complex eps_i, eps_l, eps_j, eps_r;

    Complex combination() const { return c_i * eps_i - c_l * eps_l + c_j * eps_j - c_r * eps_r; }
    double residual() const { return std::abs(Complex(w_new - w_old) - combination()); }
};

/// Coefficients for edge `edge` between two states of one chart; h_k and
/// h_km1 are full chart vectors (the sphere stencil is lifted from them).
WeightDelta weight_delta(const TriMesh& mesh, int edge,
                         const PlanarCoords& h_k, const PlanarCoords& h_km1);

/// Row-aggregated displacement operators of one region:
/// ([L^k, B^k] - [L^km1, B^km1]) g = H_I eps_I + H_B eps_B.
struct HAssembly {
    SparseMatC H_I;       // n_s x n_s
    SparseMatC H_B;       // n_s x m_s
    Eigen::VectorXcd g;   // length n_s + m_s
    Eigen::VectorXcd lhs;           // left side of the identity, rows over I_s
    double identity_residual = 0.0; // scale-aware relative residual
};

HAssembly assemble_H(const TriMesh& mesh, const IndexPartition& partition, int region,
                     const PlanarCoords& h_k, const PlanarCoords& h_km1);

/// Error-transfer matrices of one iteration step: zeta^{k+1} = S^{-1} T zeta^k.
struct ErrorTransferBundle {
    int k = 0;
    int n1 = 0, m1 = 0, n2 = 0, m2 = 0;
    Eigen::MatrixXcd S, T, curly_T;
    Eigen::VectorXcd zeta_k, zeta_kp1;
    double recursion_residual = 0.0;
};

/// Assemble the Theorem-3.5 bundle from four consecutive snapshots
/// (k-2, k-1, k, k+1). Dense; intended for small diagnostic meshes.
ErrorTransferBundle build_transfer(const TriMesh& mesh, const IndexPartition& partition,
                                   const Snapshot& snap_km2, const Snapshot& snap_km1,
                                   const Snapshot& snap_k, const Snapshot& snap_kp1, int k);

/// Running product curly_T^(k) ... curly_T^(0) with per-step max-abs
/// element and spectral radius.
struct SpectralSeries {
    std::vector<int> k;
    std::vector<double> max_abs;
    std::vector<double> spectral_radius;
};

class SpectralTracker {
public:
    void push(const ErrorTransferBundle& bundle);
    const SpectralSeries& series() const { return series_; }

private:
    Eigen::MatrixXcd product_;
    SpectralSeries series_;
};

/// Per-iteration R-linear rate estimates ||h_star - h_k||_inf^(1/k).
/// `first_k` is the iteration number of history[0]; zero differences are
/// reported as 0 (exact-convergence sentinel).
struct RateSeries {
    std::vector<int> k;
    std::vector<double> rate;
};

RateSeries r_linear_estimate(const std::vector<Eigen::VectorXcd>& history,
                             const Eigen::VectorXcd& h_star, int first_k, int window = 60);

}  // namespace eqs
