#include "equisphere/linear_solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <iostream>
#include <unsupported/Eigen/IterativeSolvers>

#include "equisphere/errors.hpp"

namespace eqs {

PartitionedSystem PartitionedSystem::from_laplacian(const StretchLaplacian& L) {
    PartitionedSystem sys;
    sys.L_II = L.interior();
    sys.L_IB = L.interior_boundary();
    return sys;
}

struct InteriorSolver::Impl {
    PartitionedSystem sys;
    Options options;
    Eigen::SparseLU<SparseMat> lu;
    Eigen::MINRES<SparseMat> minres;
    double matrix_norm_inf = 0.0;
    mutable double condition = 0.0;
    mutable bool condition_known = false;

    Eigen::VectorXd solve_real(const Eigen::VectorXd& rhs) const {
        Eigen::VectorXd x;
        if (options.iterative) {
            x = minres.solve(rhs);
            if (minres.info() != Eigen::Success) {
                throw SingularSystemError("MINRES did not converge within the iteration budget");
            }
        } else {
            x = lu.solve(rhs);
        }
        return x;
    }
};

InteriorSolver::InteriorSolver(PartitionedSystem sys) : InteriorSolver(std::move(sys), Options{}) {}

InteriorSolver::InteriorSolver(PartitionedSystem sys, Options options)
    : impl_(std::make_unique<Impl>()) {
    impl_->sys = std::move(sys);
    impl_->options = options;
    const SparseMat& A = impl_->sys.L_II;
    if (A.rows() != A.cols()) {
        throw RegionMismatchError("InteriorSolver: L_II must be square");
    }
    if (impl_->sys.L_IB.rows() != A.rows()) {
        throw RegionMismatchError("InteriorSolver: L_IB row count must match L_II");
    }
    for (int k = 0; k < A.outerSize(); ++k) {
        double row_sum = 0.0;
        for (SparseMat::InnerIterator it(A, k); it; ++it) row_sum += std::abs(it.value());
        impl_->matrix_norm_inf = std::max(impl_->matrix_norm_inf, row_sum);
    }
    if (options.iterative) {
        impl_->minres.setTolerance(options.iterative_tol);
        impl_->minres.setMaxIterations(10 * A.rows());
        impl_->minres.compute(A);
        if (impl_->minres.info() != Eigen::Success) {
            throw SingularSystemError("MINRES setup failed");
        }
    } else {
        impl_->lu.compute(A);
        if (impl_->lu.info() != Eigen::Success) {
            throw SingularSystemError("sparse LU factorization broke down: " + impl_->lu.lastErrorMessage());
        }
    }
}

InteriorSolver::~InteriorSolver() = default;
InteriorSolver::InteriorSolver(InteriorSolver&&) noexcept = default;
InteriorSolver& InteriorSolver::operator=(InteriorSolver&&) noexcept = default;

Eigen::VectorXd InteriorSolver::solve(const Eigen::VectorXd& rhs) const {
    return impl_->solve_real(rhs);
}

Eigen::VectorXcd InteriorSolver::solve(const Eigen::VectorXcd& rhs) const {
    const Eigen::VectorXd xr = impl_->solve_real(rhs.real());
    const Eigen::VectorXd xi = impl_->solve_real(rhs.imag());
    Eigen::VectorXcd x(rhs.size());
    x.real() = xr;
    x.imag() = xi;
    return x;
}

Eigen::VectorXcd InteriorSolver::solve_interior(const Eigen::VectorXcd& h_boundary) const {
    if (h_boundary.size() != impl_->sys.L_IB.cols()) {
        throw RegionMismatchError("solve_interior: boundary vector size does not match L_IB");
    }
    const Eigen::VectorXcd rhs = -(impl_->sys.L_IB * h_boundary);
    Eigen::VectorXcd x = solve(rhs);
    if (impl_->options.check_residual) {
        const double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
        const double res = (impl_->sys.L_II * x - rhs).lpNorm<Eigen::Infinity>();
        if (res > impl_->options.residual_bound * std::max(rhs_norm, 1e-300)) {
            std::cerr << "[equisphere] warning: interior solve residual " << res
                      << " exceeds " << impl_->options.residual_bound << " * " << rhs_norm << "\n";
        }
    }
    return x;
}

Eigen::MatrixXd InteriorSolver::apply_transfer() const {
    const int n = static_cast<int>(impl_->sys.L_II.rows());
    const int m = static_cast<int>(impl_->sys.L_IB.cols());
    Eigen::MatrixXd A_hat(n, m);
    Eigen::MatrixXd rhs = -Eigen::MatrixXd(impl_->sys.L_IB);
    for (int j = 0; j < m; ++j) {
        A_hat.col(j) = impl_->solve_real(rhs.col(j));
    }
    return A_hat;
}

double InteriorSolver::condition_estimate() const {
    if (impl_->condition_known) return impl_->condition;
    // Hager's estimator for ||A^{-1}||_1 using the existing factorization;
    // the matrix is symmetric so the 1- and infinity-norms coincide.
    const int n = static_cast<int>(impl_->sys.L_II.rows());
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    double estimate = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXd y = impl_->solve_real(x);
        estimate = y.lpNorm<1>();
        Eigen::VectorXd xi(n);
        for (int i = 0; i < n; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
        const Eigen::VectorXd z = impl_->solve_real(xi);  // A symmetric
        int best = 0;
        z.cwiseAbs().maxCoeff(&best);
        if (std::abs(z[best]) <= z.dot(x)) break;
        x.setZero();
        x[best] = 1.0;
    }
    impl_->condition = estimate * impl_->matrix_norm_inf;
    impl_->condition_known = true;
    if (impl_->condition > impl_->options.condition_warn) {
        std::cerr << "[equisphere] warning: interior system condition estimate "
                  << impl_->condition << " exceeds " << impl_->options.condition_warn << "\n";
    }
    return impl_->condition;
}

bool InteriorSolver::ill_conditioned() const {
    return condition_estimate() > impl_->options.condition_warn;
}

int InteriorSolver::interior_size() const { return static_cast<int>(impl_->sys.L_II.rows()); }
int InteriorSolver::boundary_size() const { return static_cast<int>(impl_->sys.L_IB.cols()); }
const PartitionedSystem& InteriorSolver::system() const { return impl_->sys; }

}  // namespace eqs
