#include "islab/elliptic_ops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <string>

#include "islab/errors.hpp"
#include "islab/rng.hpp"

namespace islab {

double frame_H_1d(double u1) {
    const double u0sq = 1.0 + u1 * u1;
    return 1.0 - u1 * u1 / u0sq;
}

namespace {

std::vector<double> sample_nodes(const std::function<double(double)>& f,
                                 const MovingGrid& g) {
    std::vector<double> out(g.n_cells);
    for (int q = 0; q < g.n_cells; ++q) out[q] = f(g.nodes[q]);
    return out;
}

}  // namespace

ScalarField1D apply_L1_tilde_1d(const ScalarField1D& rt, const EllipticBackground1D& bg,
                                const MovingGrid& g, double kappa, int accuracy) {
    const auto r = sample_nodes(bg.r, g);
    const auto dr = fd_derivative(r, 1, g, accuracy);
    const auto d1 = fd_derivative(rt, 1, g, accuracy);
    const auto d2 = fd_derivative(rt, 2, g, accuracy);
    ScalarField1D out(g.n_cells);
    for (int q = 0; q < g.n_cells; ++q) {
        const double H = frame_H_1d(bg.u1(g.nodes[q]));
        out[q] = (kappa + 1.0) * H * (r[q] * d2[q] + dr[q] * d1[q] / kappa);
    }
    return out;
}

ScalarField1D apply_L1_hat_1d(const ScalarField1D& rt, const EllipticBackground1D& bg,
                              const MovingGrid& g, double kappa, int accuracy) {
    const int n = g.n_cells;
    const auto r = sample_nodes(bg.r, g);
    const auto d1 = fd_derivative(rt, 1, g, accuracy);
    ScalarField1D flux(n);
    for (int q = 0; q < n; ++q) {
        const double H = frame_H_1d(bg.u1(g.nodes[q]));
        flux[q] = std::pow(r[q], 1.0 / kappa) * H * d1[q];
    }
    const auto dflux = fd_derivative(flux, 1, g, accuracy);
    ScalarField1D out(n);
    for (int q = 0; q < n; ++q)
        out[q] = (kappa + 1.0) * std::pow(r[q], 1.0 - 1.0 / kappa) * dflux[q];
    return out;
}

ScalarField1D apply_L2_tilde_1d(const ScalarField1D& ut, const EllipticBackground1D& bg,
                                const MovingGrid& g, double kappa, int accuracy) {
    const int n = g.n_cells;
    const auto r = sample_nodes(bg.r, g);
    const auto dr = fd_derivative(r, 1, g, accuracy);
    const auto d1 = fd_derivative(ut, 1, g, accuracy);
    ScalarField1D rdu(n);
    for (int q = 0; q < n; ++q) rdu[q] = r[q] * d1[q];
    const auto drdu = fd_derivative(rdu, 1, g, accuracy);
    ScalarField1D out(n);
    for (int q = 0; q < n; ++q) {
        const double H = frame_H_1d(bg.u1(g.nodes[q]));
        out[q] = (kappa + 1.0) * H * (drdu[q] + dr[q] * d1[q] / kappa);
    }
    return out;
}

ScalarField1D apply_L2_hat_1d(const ScalarField1D& ut, const EllipticBackground1D& bg,
                              const MovingGrid& g, double kappa, int accuracy) {
    const int n = g.n_cells;
    const auto r = sample_nodes(bg.r, g);
    ScalarField1D weighted(n);
    for (int q = 0; q < n; ++q) {
        const double H = frame_H_1d(bg.u1(g.nodes[q]));
        weighted[q] = std::pow(r[q], 1.0 / kappa) * H * ut[q];
    }
    const auto div1 = fd_derivative(weighted, 1, g, accuracy);
    ScalarField1D mid(n);
    for (int q = 0; q < n; ++q)
        mid[q] = std::pow(r[q], 1.0 - 1.0 / kappa) * div1[q];
    const auto dmid = fd_derivative(mid, 1, g, accuracy);
    ScalarField1D out(n);
    for (int q = 0; q < n; ++q) out[q] = (kappa + 1.0) * dmid[q];
    return out;
}

ScalarField1D apply_L3_tilde_1d(const ScalarField1D& ut, const MovingGrid& g) {
    (void)ut;
    return ScalarField1D(g.n_cells, 0.0);
}

DiscreteOperator assemble_l1hat_1d(const EllipticBackground1D& bg, const MovingGrid& g,
                                   double kappa) {
    const int n = g.n_cells;
    const double h = g.h();
    DiscreteOperator op;
    op.sigma = 0.5 * (1.0 / kappa - 1.0);
    op.block = 1;
    op.boundary_handling = "natural flux form; degenerate edge weight vanishes";

    // Interior faces q = 1..n-1 at x = b + q h; edge faces carry no flux.
    std::vector<Eigen::Triplet<double>> st;
    for (int f = 1; f <= n - 1; ++f) {
        const double x = g.b + f * h;
        const double rf = bg.r(x);
        const double w = (kappa + 1.0) * h * std::pow(std::max(rf, 0.0), 1.0 / kappa) *
                         frame_H_1d(bg.u1(x)) / (h * h);
        st.emplace_back(f - 1, f - 1, w);
        st.emplace_back(f, f, w);
        st.emplace_back(f - 1, f, -w);
        st.emplace_back(f, f - 1, -w);
    }
    op.S.resize(n, n);
    op.S.setFromTriplets(st.begin(), st.end());

    std::vector<Eigen::Triplet<double>> nt, nit;
    for (int q = 0; q < n; ++q) {
        const double m = h * std::pow(bg.r(g.nodes[q]), 2.0 * op.sigma);
        nt.emplace_back(q, q, m);
        nit.emplace_back(q, q, 1.0 / m);
    }
    op.N.resize(n, n);
    op.N.setFromTriplets(nt.begin(), nt.end());
    op.Ninv.resize(n, n);
    op.Ninv.setFromTriplets(nit.begin(), nit.end());
    return op;
}

DiscreteOperator assemble_l23hat_1d(const EllipticBackground1D& bg, const MovingGrid& g,
                                    double kappa) {
    const int n = g.n_cells;
    const double h = g.h();
    DiscreteOperator op;
    op.sigma = 0.5 / kappa;
    op.block = 1;
    op.boundary_handling = "no-flux at both edge faces (degenerate edge omitted)";

    // (B v)_f = ([r^{1/k} H v]_f - [r^{1/k} H v]_{f-1}) / h at interior faces,
    // outer weight h r^{1-1/k}(face).
    std::vector<double> nodew(n);
    for (int q = 0; q < n; ++q)
        nodew[q] = std::pow(bg.r(g.nodes[q]), 1.0 / kappa) * frame_H_1d(bg.u1(g.nodes[q]));
    std::vector<Eigen::Triplet<double>> st;
    for (int f = 1; f <= n - 1; ++f) {
        const double x = g.b + f * h;
        const double w = (kappa + 1.0) * h * std::pow(bg.r(x), 1.0 - 1.0 / kappa) / (h * h);
        // Quadratic form contribution w * (nodew[f] v_f - nodew[f-1] v_{f-1})^2.
        const double a = nodew[f];
        const double b2 = nodew[f - 1];
        st.emplace_back(f, f, w * a * a);
        st.emplace_back(f - 1, f - 1, w * b2 * b2);
        st.emplace_back(f, f - 1, -w * a * b2);
        st.emplace_back(f - 1, f, -w * a * b2);
    }
    op.S.resize(n, n);
    op.S.setFromTriplets(st.begin(), st.end());

    std::vector<Eigen::Triplet<double>> nt, nit;
    for (int q = 0; q < n; ++q) {
        const double m =
            h * std::pow(bg.r(g.nodes[q]), 2.0 * op.sigma) * frame_H_1d(bg.u1(g.nodes[q]));
        nt.emplace_back(q, q, m);
        nit.emplace_back(q, q, 1.0 / m);
    }
    op.N.resize(n, n);
    op.N.setFromTriplets(nt.begin(), nt.end());
    op.Ninv.resize(n, n);
    op.Ninv.setFromTriplets(nit.begin(), nit.end());
    return op;
}

Eigen::VectorXd solve_shifted(const DiscreteOperator& op, const Eigen::VectorXd& rhs,
                              double tol, int max_iters, int* iters_out) {
    if (!rhs.allFinite()) throw domain_error("solve_shifted: non-finite rhs");
    const Eigen::VectorXd b = op.N * rhs;
    auto apply_A = [&op](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return op.S * x + op.N * x;
    };
    Eigen::VectorXd diag(op.size());
    for (int i = 0; i < op.size(); ++i) diag(i) = op.S.coeff(i, i) + op.N.coeff(i, i);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(op.size());
    Eigen::VectorXd res = b;
    Eigen::VectorXd z = res.cwiseQuotient(diag);
    Eigen::VectorXd p = z;
    double rz = res.dot(z);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        if (iters_out) *iters_out = 0;
        return x;
    }
    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd Ap = apply_A(p);
        const double alpha = rz / p.dot(Ap);
        x += alpha * p;
        res -= alpha * Ap;
        if (res.norm() <= tol * bnorm) {
            if (iters_out) *iters_out = it + 1;
            return x;
        }
        z = res.cwiseQuotient(diag);
        const double rz_new = res.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    throw convergence_error("solve_shifted: CG cap exceeded, relative residual " +
                            std::to_string(res.norm() / bnorm));
}

namespace {

double sparse_inf_norm(const SpMat& m) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
            rows(it.row()) += std::abs(it.value());
    return rows.maxCoeff();
}

double symmetry_defect(const SpMat& s) {
    SpMat d = SpMat(s.transpose()) - s;
    const double denom = sparse_inf_norm(s);
    return denom > 0.0 ? sparse_inf_norm(d) / denom : 0.0;
}

double operator_inf_norm(const DiscreteOperator& op) {
    SpMat m = op.Ninv * op.S;
    return sparse_inf_norm(m);
}

}  // namespace

namespace {

bool is_tridiagonal(const SpMat& s) {
    for (int k = 0; k < s.outerSize(); ++k)
        for (SpMat::InnerIterator it(s, k); it; ++it)
            if (std::abs(it.row() - it.col()) > 1) return false;
    return true;
}

bool is_diagonal(const SpMat& s) {
    for (int k = 0; k < s.outerSize(); ++k)
        for (SpMat::InnerIterator it(s, k); it; ++it)
            if (it.row() != it.col() && it.value() != 0.0) return false;
    return true;
}

}  // namespace

SpectrumReport spectrum_dense(const DiscreteOperator& op) {
    SpectrumReport rep;
    rep.sym_defect = symmetry_defect(op.S);
    rep.op_norm = operator_inf_norm(op);
    const int n = op.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (op.block == 1 && is_tridiagonal(op.S) && is_diagonal(op.N)) {
        // 1D flux-form stiffness with diagonal mass: N^{-1/2} S N^{-1/2} stays
        // tridiagonal, so the O(n^2) tridiagonal QR path applies.
        rep.method = "tridiagonal eigensolver on N^{-1/2} S N^{-1/2}";
        Eigen::VectorXd diag(n), sub(n - 1);
        for (int i = 0; i < n; ++i) diag(i) = op.S.coeff(i, i) / op.N.coeff(i, i);
        for (int i = 0; i + 1 < n; ++i)
            sub(i) = op.S.coeff(i + 1, i) /
                     std::sqrt(op.N.coeff(i, i) * op.N.coeff(i + 1, i + 1));
        es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    } else {
        rep.method = "dense generalized self-adjoint eigensolver";
        Eigen::MatrixXd S = Eigen::MatrixXd(op.S);
        Eigen::MatrixXd N = Eigen::MatrixXd(op.N);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
            S, N, Eigen::EigenvaluesOnly);
        if (ges.info() != Eigen::Success)
            throw convergence_error("spectrum_dense: eigensolver failed");
        SpectrumReport out = rep;
        out.min_eig = ges.eigenvalues().minCoeff();
        out.max_eig = ges.eigenvalues().maxCoeff();
        out.psd_certified = out.min_eig >= -1e-8 * std::max(out.op_norm, out.max_eig);
        return out;
    }
    if (es.info() != Eigen::Success)
        throw convergence_error("spectrum_dense: tridiagonal eigensolver failed");
    rep.min_eig = es.eigenvalues().minCoeff();
    rep.max_eig = es.eigenvalues().maxCoeff();
    rep.psd_certified = rep.min_eig >= -1e-8 * std::max(rep.op_norm, rep.max_eig);
    return rep;
}

SpectrumReport spectrum_sparse(const DiscreteOperator& op, double delta_rel,
                               std::uint64_t probe_seed) {
    SpectrumReport rep;
    rep.sym_defect = symmetry_defect(op.S);
    rep.op_norm = operator_inf_norm(op);
    rep.method = "sparse LDLT certificate + Rayleigh probes";
    const double delta = delta_rel * rep.op_norm;
    SpMat shifted = op.S + SpMat(delta * op.N);
    Eigen::SimplicialLDLT<SpMat> ldlt(shifted);
    bool pos = ldlt.info() == Eigen::Success;
    if (pos) {
        const auto& d = ldlt.vectorD();
        for (int i = 0; i < d.size(); ++i)
            if (!(d(i) > 0.0)) pos = false;
    }
    rep.psd_certified = pos;
    rep.min_eig = pos ? -delta : std::nan("");

    CounterRng rng(probe_seed);
    double rmax = 0.0;
    for (int trial = 0; trial < 16; ++trial) {
        Eigen::VectorXd v(op.size());
        for (int i = 0; i < op.size(); ++i) v(i) = rng.normal();
        for (int it = 0; it < 30; ++it) {
            Eigen::VectorXd w = op.apply(v);
            const double nn = std::sqrt(op.inner(w, w));
            if (nn == 0.0) break;
            v = w / nn;
        }
        const double num = op.inner(v, op.apply(v));
        const double den = op.inner(v, v);
        if (den > 0.0) rmax = std::max(rmax, num / den);
    }
    rep.max_eig = rmax;
    return rep;
}

}  // namespace islab
