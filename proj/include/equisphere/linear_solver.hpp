#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>

#include "equisphere/stretch_laplacian.hpp"

namespace eqs {

/// Interior system of one hemispherical chart:
/// L_II h_I = -L_IB h_B with real sparse L and complex right-hand side.
struct PartitionedSystem {
    SparseMat L_II;
    SparseMat L_IB;

    static PartitionedSystem from_laplacian(const StretchLaplacian& L);
};

/// Direct sparse solver over a partitioned system. One real factorization
/// serves both the real and imaginary right-hand-side parts and any number
/// of solves; negative cotangent weights may make the matrix indefinite,
/// which the LU path treats as normal.
class InteriorSolver {
public:
    struct Options {
        bool iterative = false;           // MINRES fallback instead of direct LU
        double iterative_tol = 1e-12;
        double residual_bound = 1e-10;    // relative infinity-norm residual gate
        bool check_residual = true;
        double condition_warn = 1e12;
    };

    explicit InteriorSolver(PartitionedSystem sys);
    InteriorSolver(PartitionedSystem sys, Options options);
    ~InteriorSolver();
    InteriorSolver(InteriorSolver&&) noexcept;
    InteriorSolver& operator=(InteriorSolver&&) noexcept;

    /// h_I from boundary values h_B; residual-checked.
    Eigen::VectorXcd solve_interior(const Eigen::VectorXcd& h_boundary) const;

    /// Real right-hand-side solve L_II x = rhs (diagnostics helper).
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

    /// Materialized transfer operator A_hat = -L_II^{-1} L_IB
    /// (diagnostics only; one dense column per ring vertex).
    Eigen::MatrixXd apply_transfer() const;

    /// One-sided condition estimate from the factorization (Hager-style
    /// 1-norm estimate of the inverse times the matrix norm).
    double condition_estimate() const;

    /// True when the last condition estimate exceeded the warn threshold.
    bool ill_conditioned() const;

    int interior_size() const;
    int boundary_size() const;
    const PartitionedSystem& system() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace eqs
