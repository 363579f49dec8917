#include "equisphere/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "equisphere/errors.hpp"

namespace eqs {

namespace {

constexpr double kGammaTol = 1e-14;

// d_t of the decomposition: the chordal/plane displacement ratio with the
// phase of eps_t removed, so that d_t * eps_t is the (real) chord length.
Complex d_factor(const Complex& h_new, const Complex& h_old) {
    const Complex eps = h_new - h_old;
    const double psi = std::abs(eps) == 0.0 ? 0.0 : std::arg(eps);
    const double mag = 2.0 / std::sqrt((1.0 + std::norm(h_new)) * (1.0 + std::norm(h_old)));
    return std::polar(mag, -psi);
}

// d * (u . v) / (||u|| * 4 area); zero displacement contributes nothing.
Complex coef(const Complex& d, const Vec3& u, const Vec3& v, double area) {
    const double un = u.norm();
    if (un == 0.0) return Complex(0.0, 0.0);
    return d * (u.dot(v) / (un * 4.0 * area));
}

Eigen::VectorXcd gather(const PlanarCoords& h, const std::vector<int>& ids) {
    Eigen::VectorXcd out(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) out[i] = h[ids[i]];
    return out;
}

// Dense solve of the region system against many complex columns.
Eigen::MatrixXcd solve_columns(const InteriorSolver& solver, const Eigen::MatrixXcd& rhs) {
    Eigen::MatrixXcd out(rhs.rows(), rhs.cols());
    for (Eigen::Index j = 0; j < rhs.cols(); ++j) {
        out.col(j) = solver.solve(Eigen::VectorXcd(rhs.col(j)));
    }
    return out;
}

struct RegionOps {
    StretchLaplacian L;
    InteriorSolver solver;

    RegionOps(const TriMesh& mesh, const IndexPartition& partition, int region, const Positions& f)
        : L(assemble_laplacian(mesh, f, region, partition)),
          solver(PartitionedSystem::from_laplacian(L)) {}
};

}  // namespace

WeightDelta weight_delta(const TriMesh& mesh, int edge,
                         const PlanarCoords& h_k, const PlanarCoords& h_km1) {
    const Edge& e = mesh.edges[edge];
    const int i = e.a;
    const int j = e.b;
    const int l = e.opp_ba;  // opposite vertex of [v_i, v_l, v_j]
    const int r = e.opp_ab;  // opposite vertex of [v_j, v_r, v_i]
    const double area_l = mesh.face_areas[e.face_ba];
    const double area_r = mesh.face_areas[e.face_ab];

    auto lift_pair = [&](int t, Vec3& now, Vec3& old) {
        now = inverse_stereographic(h_k[t]);
        old = inverse_stereographic(h_km1[t]);
    };
    Vec3 fi, fi0, fj, fj0, fl, fl0, fr, fr0;
    lift_pair(i, fi, fi0);
    lift_pair(j, fj, fj0);
    lift_pair(l, fl, fl0);
    lift_pair(r, fr, fr0);

    WeightDelta wd;
    wd.edge = edge;
    wd.w_new = -((fl - fi).dot(fl - fj) / (4.0 * area_l) + (fr - fi).dot(fr - fj) / (4.0 * area_r));
    wd.w_old = -((fl0 - fi0).dot(fl0 - fj0) / (4.0 * area_l) + (fr0 - fi0).dot(fr0 - fj0) / (4.0 * area_r));

    wd.eps_i = h_k[i] - h_km1[i];
    wd.eps_j = h_k[j] - h_km1[j];
    wd.eps_l = h_k[l] - h_km1[l];
    wd.eps_r = h_k[r] - h_km1[r];

    const Complex d_i = d_factor(h_k[i], h_km1[i]);
    const Complex d_j = d_factor(h_k[j], h_km1[j]);
    const Complex d_l = d_factor(h_k[l], h_km1[l]);
    const Complex d_r = d_factor(h_k[r], h_km1[r]);

    const Vec3 u_i = fi - fi0;
    const Vec3 u_j = fj - fj0;
    const Vec3 u_l = fl - fl0;
    const Vec3 u_r = fr - fr0;

    const Vec3 sum_l = fl - fj + fl0 - fi0;
    const Vec3 sum_r = fr - fi + fr0 - fj0;

    wd.c_l = coef(d_l, u_l, sum_l, area_l);
    wd.c_r = coef(d_r, u_r, sum_r, area_r);
    wd.c_i = coef(d_i, u_i, fl - fj, area_l) + coef(d_i, u_i, fr0 - fj0, area_r);
    wd.c_j = coef(d_j, u_j, fl0 - fi0, area_l) + coef(d_j, u_j, fr - fi, area_r);
    return wd;
}

HAssembly assemble_H(const TriMesh& mesh, const IndexPartition& partition, int region,
                     const PlanarCoords& h_k, const PlanarCoords& h_km1) {
    const auto& interior = partition.interior(region);
    const auto& boundary = partition.boundary(region);
    const auto& loc = partition.local(region);
    const int n_s = static_cast<int>(interior.size());
    const int m_s = static_cast<int>(boundary.size());

    // g = [ (L^{k-1})^{-1} B^{k-1} h_B^k ; -h_B^k ].
    RegionOps prev(mesh, partition, region, lift_to_sphere(h_km1));
    const Eigen::VectorXcd h_B_k = gather(h_k, boundary);
    Eigen::VectorXcd g(n_s + m_s);
    g.head(n_s) = -prev.solver.solve_interior(h_B_k);
    g.tail(m_s) = -h_B_k;

    std::vector<Eigen::Triplet<Complex>> trips_I, trips_B;
    Eigen::VectorXcd lhs = Eigen::VectorXcd::Zero(n_s);

    auto add = [&](int row_local, int col_global, const Complex& value) {
        const int lc = loc[col_global];
        if (lc < 0) {
            throw DimensionMismatchError("assemble_H: stencil vertex escapes the region index set");
        }
        if (lc < n_s) {
            trips_I.emplace_back(row_local, lc, value);
        } else {
            trips_B.emplace_back(row_local, lc - n_s, value);
        }
    };

    for (int li = 0; li < n_s; ++li) {
        const int i = interior[li];
        for (int j : mesh.vertex_neighbors[i]) {
            const int ei = mesh.edge_between(i, j);
            const WeightDelta wd = weight_delta(mesh, ei, h_k, h_km1);
            const Edge& e = mesh.edges[ei];
            const Complex gdiff = g[loc[j]] - g[loc[i]];
            lhs[li] += Complex(wd.w_new - wd.w_old) * gdiff;
            // Vertex-labelled coefficients: endpoints enter with +, the two
            // opposite vertices with -.
            add(li, e.a, (e.a == i ? wd.c_i : wd.c_j) * gdiff);
            add(li, e.b, (e.b == i ? wd.c_i : wd.c_j) * gdiff);
            add(li, e.opp_ba, -wd.c_l * gdiff);
            add(li, e.opp_ab, -wd.c_r * gdiff);
        }
    }

    HAssembly out;
    out.g = std::move(g);
    out.lhs = std::move(lhs);
    out.H_I.resize(n_s, n_s);
    out.H_I.setFromTriplets(trips_I.begin(), trips_I.end());
    out.H_B.resize(n_s, m_s);
    out.H_B.setFromTriplets(trips_B.begin(), trips_B.end());

    const Eigen::VectorXcd eps_I = gather(h_k, interior) - gather(h_km1, interior);
    const Eigen::VectorXcd eps_B = h_B_k - gather(h_km1, boundary);
    const Eigen::VectorXcd rhs = out.H_I * eps_I + out.H_B * eps_B;
    const double term_scale = out.H_I.norm() * eps_I.norm() + out.H_B.norm() * eps_B.norm();
    const double scale = std::max({out.lhs.norm(), term_scale, 1e-300});
    out.identity_residual = (out.lhs - rhs).norm() / scale;
    return out;
}

ErrorTransferBundle build_transfer(const TriMesh& mesh, const IndexPartition& partition,
                                   const Snapshot& snap_km2, const Snapshot& snap_km1,
                                   const Snapshot& snap_k, const Snapshot& snap_kp1, int k) {
    const int n1 = partition.n1();
    const int m1 = partition.m1();
    const int n2 = partition.n2();
    const int m2 = partition.m2();
    const int ell = n1 + m1 + 2 * (n2 + m2);

    ErrorTransferBundle bundle;
    bundle.k = k;
    bundle.n1 = n1;
    bundle.m1 = m1;
    bundle.n2 = n2;
    bundle.m2 = m2;

    // Region operators at the snapshot positions that produced each solve.
    RegionOps L1_k(mesh, partition, 1, lift_to_sphere(snap_k.h1));
    RegionOps L2_k(mesh, partition, 2, lift_to_sphere(snap_k.h2));
    RegionOps L2_km1(mesh, partition, 2, lift_to_sphere(snap_km1.h2));

    const Eigen::MatrixXd A1_hat_k = L1_k.solver.apply_transfer();
    const Eigen::MatrixXd A2_hat_k = L2_k.solver.apply_transfer();
    const Eigen::MatrixXd A2_hat_km1 = L2_km1.solver.apply_transfer();

    // Row selections: B2 inside region 1's interior ordering, B1 inside
    // region 2's.
    std::vector<int> rows_B2_in_I1(m2), rows_B1_in_I2(m1);
    for (int t = 0; t < m2; ++t) rows_B2_in_I1[t] = partition.loc1[partition.B2[t]];
    for (int t = 0; t < m1; ++t) rows_B1_in_I2[t] = partition.loc2[partition.B1[t]];

    auto select_rows = [](const Eigen::MatrixXcd& M, const std::vector<int>& rows) {
        Eigen::MatrixXcd out(rows.size(), M.cols());
        for (std::size_t t = 0; t < rows.size(); ++t) out.row(t) = M.row(rows[t]);
        return out;
    };

    const Eigen::MatrixXcd A1_k = select_rows(A1_hat_k.cast<Complex>(), rows_B2_in_I1);
    const Eigen::MatrixXcd A2_km1 = select_rows(A2_hat_km1.cast<Complex>(), rows_B1_in_I2);

    // Gamma diagonals from the recorded iterates: the products of two
    // consecutive transferred boundary evaluations.
    Eigen::VectorXcd gamma2(m1);  // pairs with B1-indexed rows
    for (int t = 0; t < m1; ++t) {
        const int v = partition.B1[t];
        const Complex den = snap_km1.h2[v] * snap_k.h2[v];
        if (std::abs(den) < kGammaTol) {
            throw SingularGammaError("Gamma_2 denominator vanished at ring vertex " + std::to_string(v));
        }
        gamma2[t] = 1.0 / den;
    }
    Eigen::VectorXcd gamma1(m2);  // pairs with B2-indexed rows
    for (int t = 0; t < m2; ++t) {
        const int v = partition.B2[t];
        const Complex den = snap_k.h1[v] * snap_kp1.h1[v];
        if (std::abs(den) < kGammaTol) {
            throw SingularGammaError("Gamma_1 denominator vanished at ring vertex " + std::to_string(v));
        }
        gamma1[t] = 1.0 / den;
    }

    const HAssembly H1_k = assemble_H(mesh, partition, 1, snap_k.h1, snap_km1.h1);
    const HAssembly H2_k = assemble_H(mesh, partition, 2, snap_k.h2, snap_km1.h2);
    const HAssembly H2_km1 = assemble_H(mesh, partition, 2, snap_km1.h2, snap_km2.h2);

    // T21/T22: (L1^k)^{-1} conj(H1^k); T43/T44: (L2^k)^{-1} H2^k.
    const Eigen::MatrixXcd T21 = solve_columns(L1_k.solver, Eigen::MatrixXcd(H1_k.H_B).conjugate());
    const Eigen::MatrixXcd T22 = solve_columns(L1_k.solver, Eigen::MatrixXcd(H1_k.H_I).conjugate());
    const Eigen::MatrixXcd T43 = solve_columns(L2_k.solver, Eigen::MatrixXcd(H2_k.H_B));
    const Eigen::MatrixXcd T44 = solve_columns(L2_k.solver, Eigen::MatrixXcd(H2_k.H_I));
    const Eigen::MatrixXcd W_B = solve_columns(L2_km1.solver, Eigen::MatrixXcd(H2_km1.H_B));
    const Eigen::MatrixXcd W_I = solve_columns(L2_km1.solver, Eigen::MatrixXcd(H2_km1.H_I));

    const Eigen::MatrixXcd T13 = (-gamma2).asDiagonal() * A2_km1;
    const Eigen::MatrixXcd T15 = (-gamma2).asDiagonal() * select_rows(W_B, rows_B1_in_I2);
    const Eigen::MatrixXcd T16 = (-gamma2).asDiagonal() * select_rows(W_I, rows_B1_in_I2);
    const Eigen::MatrixXcd S31 = (-gamma1.conjugate()).asDiagonal() * A1_k;
    const Eigen::MatrixXcd T31 = (-gamma1.conjugate()).asDiagonal() * select_rows(T21, rows_B2_in_I1);
    const Eigen::MatrixXcd T32 = (-gamma1.conjugate()).asDiagonal() * select_rows(T22, rows_B2_in_I1);

    // Block layout: [B1 | I1 | B2 | I2 | B2' | I2'] with sizes
    // [m1, n1, m2, n2, m2, n2].
    const int o1 = 0, o2 = m1, o3 = m1 + n1, o4 = m1 + n1 + m2, o5 = o4 + n2, o6 = o5 + m2;

    bundle.S = Eigen::MatrixXcd::Identity(ell, ell);
    bundle.S.block(o2, o1, n1, m1) = -A1_hat_k.cast<Complex>();
    bundle.S.block(o3, o1, m2, m1) = -S31;
    bundle.S.block(o4, o3, n2, m2) = -A2_hat_k.cast<Complex>();

    bundle.T = Eigen::MatrixXcd::Zero(ell, ell);
    bundle.T.block(o1, o3, m1, m2) = T13;
    bundle.T.block(o1, o5, m1, m2) = T15;
    bundle.T.block(o1, o6, m1, n2) = T16;
    bundle.T.block(o2, o1, n1, m1) = T21;
    bundle.T.block(o2, o2, n1, n1) = T22;
    bundle.T.block(o3, o1, m2, m1) = T31;
    bundle.T.block(o3, o2, m2, n1) = T32;
    bundle.T.block(o4, o3, n2, m2) = T43;
    bundle.T.block(o4, o4, n2, n2) = T44;
    bundle.T.block(o5, o3, m2, m2) = Eigen::MatrixXcd::Identity(m2, m2);
    bundle.T.block(o6, o4, n2, n2) = Eigen::MatrixXcd::Identity(n2, n2);

    bundle.curly_T = bundle.S.partialPivLu().solve(bundle.T);

    auto zeta = [&](const Snapshot& now, const Snapshot& prev, const Snapshot& prev2) {
        Eigen::VectorXcd z(ell);
        z.segment(o1, m1) = (gather(now.h1, partition.B1) - gather(prev.h1, partition.B1)).conjugate();
        z.segment(o2, n1) = (gather(now.h1, partition.I1) - gather(prev.h1, partition.I1)).conjugate();
        z.segment(o3, m2) = gather(now.h2, partition.B2) - gather(prev.h2, partition.B2);
        z.segment(o4, n2) = gather(now.h2, partition.I2) - gather(prev.h2, partition.I2);
        z.segment(o5, m2) = gather(prev.h2, partition.B2) - gather(prev2.h2, partition.B2);
        z.segment(o6, n2) = gather(prev.h2, partition.I2) - gather(prev2.h2, partition.I2);
        return z;
    };
    bundle.zeta_k = zeta(snap_k, snap_km1, snap_km2);
    bundle.zeta_kp1 = zeta(snap_kp1, snap_k, snap_km1);

    const Eigen::VectorXcd predicted = bundle.curly_T * bundle.zeta_k;
    bundle.recursion_residual =
        (bundle.zeta_kp1 - predicted).norm() / std::max(bundle.zeta_kp1.norm(), 1e-300);
    return bundle;
}

void SpectralTracker::push(const ErrorTransferBundle& bundle) {
    if (product_.size() == 0) {
        product_ = bundle.curly_T;
    } else {
        if (product_.rows() != bundle.curly_T.rows()) {
            throw DimensionMismatchError("SpectralTracker: bundle dimension changed mid-series");
        }
        product_ = bundle.curly_T * product_;
    }
    series_.k.push_back(bundle.k);
    series_.max_abs.push_back(product_.cwiseAbs().maxCoeff());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(product_, false);
    if (eig.info() != Eigen::Success) {
        throw EigenFailureError("eigenvalue computation failed for the transfer product");
    }
    series_.spectral_radius.push_back(eig.eigenvalues().cwiseAbs().maxCoeff());
}

RateSeries r_linear_estimate(const std::vector<Eigen::VectorXcd>& history,
                             const Eigen::VectorXcd& h_star, int first_k, int window) {
    RateSeries series;
    const int count = static_cast<int>(history.size());
    const int begin = std::max(0, count - 1 - window);
    for (int idx = begin; idx + 1 < count; ++idx) {
        const int k = first_k + idx;
        const double err = (h_star - history[idx]).lpNorm<Eigen::Infinity>();
        series.k.push_back(k);
        series.rate.push_back(err == 0.0 ? 0.0 : std::exp(std::log(err) / k));
    }
    return series;
}

}  // namespace eqs
