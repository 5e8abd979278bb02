#include <Eigen/Sparse>
#include <cmath>

#include "islab/elliptic_ops.hpp"
#include "islab/errors.hpp"

namespace islab {

namespace {

// H^{ij} = delta^{ij} - u^i u^j / (u^0)^2 and its cofactor matrix
// cof(H) = (1 - |v|^2) I + v v^T with v = u_spatial / u^0.
struct FrameAt {
    std::array<std::array<double, 3>, 3> H;
    std::array<std::array<double, 3>, 3> cof;
};

FrameAt frame_at(const std::array<double, 3>& uspatial) {
    const double u0sq =
        1.0 + uspatial[0] * uspatial[0] + uspatial[1] * uspatial[1] + uspatial[2] * uspatial[2];
    std::array<double, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = uspatial[i] / std::sqrt(u0sq);
    double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    FrameAt f;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            f.H[i][j] = (i == j ? 1.0 : 0.0) - v[i] * v[j];
            f.cof[i][j] = (i == j ? (1.0 - v2) : 0.0) + v[i] * v[j];
        }
    return f;
}

// Centered/one-sided stencil derivative along one axis of a node field.
std::vector<double> axis_derivative(const std::vector<double>& f, const Grid3D& g,
                                    int axis, int accuracy) {
    const int n = g.n;
    std::vector<double> out(g.size());
    std::vector<double> line(n), dline(n);
    const auto fetch = [&](int i, int j, int k) { return f[g.idx(i, j, k)]; };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                if (axis == 0) line[c] = fetch(c, a, b);
                else if (axis == 1) line[c] = fetch(a, c, b);
                else line[c] = fetch(a, b, c);
            }
            dline = fd_derivative_axis(line, 1, g.h, accuracy);
            for (int c = 0; c < n; ++c) {
                if (axis == 0) out[g.idx(c, a, b)] = dline[c];
                else if (axis == 1) out[g.idx(a, c, b)] = dline[c];
                else out[g.idx(a, b, c)] = dline[c];
            }
        }
    return out;
}

std::vector<double> sample_scalar(const std::function<double(std::array<double, 3>)>& f,
                                  const Grid3D& g) {
    std::vector<double> out(g.size());
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) out[g.idx(i, j, k)] = f(g.node(i, j, k));
    return out;
}

// Sparse first-derivative matrix along an axis (2nd-order centered, one-sided
// 2nd-order at the faces) - the compact stencil keeps the assembled operators
// sparse.
SpMat derivative_matrix(const Grid3D& g, int axis) {
    const int n = g.n;
    const double h = g.h;
    std::vector<Eigen::Triplet<double>> t;
    auto shift_idx = [&](int i, int j, int k, int s) {
        int c[3] = {i, j, k};
        c[axis] += s;
        return g.idx(c[0], c[1], c[2]);
    };
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const int row = g.idx(i, j, k);
                const int pos = (axis == 0) ? i : (axis == 1 ? j : k);
                if (pos == 0) {
                    t.emplace_back(row, shift_idx(i, j, k, 0), -1.5 / h);
                    t.emplace_back(row, shift_idx(i, j, k, 1), 2.0 / h);
                    t.emplace_back(row, shift_idx(i, j, k, 2), -0.5 / h);
                } else if (pos == n - 1) {
                    t.emplace_back(row, shift_idx(i, j, k, 0), 1.5 / h);
                    t.emplace_back(row, shift_idx(i, j, k, -1), -2.0 / h);
                    t.emplace_back(row, shift_idx(i, j, k, -2), 0.5 / h);
                } else {
                    t.emplace_back(row, shift_idx(i, j, k, 1), 0.5 / h);
                    t.emplace_back(row, shift_idx(i, j, k, -1), -0.5 / h);
                }
            }
    SpMat m(g.size(), g.size());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SpMat diag_sparse(const Eigen::VectorXd& d) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(d.size());
    for (int i = 0; i < d.size(); ++i) t.emplace_back(i, i, d(i));
    SpMat m(d.size(), d.size());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

struct Background3DSamples {
    std::vector<double> r;
    std::vector<FrameAt> frame;
};

Background3DSamples sample_background(const EllipticBackground3D& bg, const Grid3D& g) {
    Background3DSamples s;
    s.r.resize(g.size());
    s.frame.resize(g.size());
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                const auto x = g.node(i, j, k);
                const int id = g.idx(i, j, k);
                s.r[id] = bg.r(x);
                if (!(s.r[id] > 0.0))
                    throw degeneracy_error("3d background r must be positive at nodes");
                s.frame[id] = frame_at(bg.u(x));
            }
    return s;
}

}  // namespace

std::vector<double> apply_L1_tilde_3d(const std::vector<double>& rt,
                                      const EllipticBackground3D& bg, const Grid3D& g,
                                      double kappa, int accuracy) {
    const auto s = sample_background(bg, g);
    std::array<std::vector<double>, 3> d1;
    for (int a = 0; a < 3; ++a) d1[a] = axis_derivative(rt, g, a, accuracy);
    std::array<std::vector<double>, 3> dr;
    for (int a = 0; a < 3; ++a) dr[a] = axis_derivative(s.r, g, a, accuracy);
    std::array<std::array<std::vector<double>, 3>, 3> d2;
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) d2[a][b] = axis_derivative(d1[a], g, b, accuracy);
    std::vector<double> out(g.size(), 0.0);
    for (int id = 0; id < g.size(); ++id) {
        double acc = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const double hess = (a <= b) ? d2[a][b][id] : d2[b][a][id];
                acc += s.frame[id].H[a][b] *
                       (s.r[id] * hess + dr[a][id] * d1[b][id] / kappa);
            }
        out[id] = (kappa + 1.0) * acc;
    }
    return out;
}

VectorField3D apply_L2_tilde_3d(const VectorField3D& v, const EllipticBackground3D& bg,
                                const Grid3D& g, double kappa, int accuracy) {
    const int N = g.size();
    const auto s = sample_background(bg, g);
    std::array<std::vector<double>, 3> dr;
    for (int a = 0; a < 3; ++a) dr[a] = axis_derivative(s.r, g, a, accuracy);

    // core_i = H^{jk} [ d_i ( r d_j v_k ) + (1/kappa) d_j r d_i v_k ]
    std::array<std::array<std::vector<double>, 3>, 3> dv;  // dv[j][k] = d_j v_k
    for (int k = 0; k < 3; ++k) {
        std::vector<double> comp(v.begin() + k * N, v.begin() + (k + 1) * N);
        for (int j = 0; j < 3; ++j) dv[j][k] = axis_derivative(comp, g, j, accuracy);
    }
    VectorField3D out(3 * N, 0.0);
    for (int i = 0; i < 3; ++i) {
        // Sum over (j,k): H^{jk} varies per node, so materialize the weighted
        // divergence argument before the outer derivative.
        std::vector<double> inner(N, 0.0);
        for (int id = 0; id < N; ++id) {
            double acc = 0.0;
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    acc += s.frame[id].H[j][k] * s.r[id] * dv[j][k][id];
            inner[id] = acc;
        }
        const auto dinner = axis_derivative(inner, g, i, accuracy);
        for (int id = 0; id < N; ++id) {
            double lower = 0.0;
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    lower += s.frame[id].H[j][k] * dr[j][id] * dv[i][k][id] / kappa;
            out[i * N + id] = (kappa + 1.0) * (dinner[id] + lower);
        }
    }
    return out;
}

VectorField3D apply_L3_tilde_3d(const VectorField3D& v, const EllipticBackground3D& bg,
                                const Grid3D& g, double kappa, int accuracy) {
    const int N = g.size();
    const auto s = sample_background(bg, g);
    std::array<std::array<std::vector<double>, 3>, 3> dv;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> comp(v.begin() + k * N, v.begin() + (k + 1) * N);
        for (int j = 0; j < 3; ++j) dv[j][k] = axis_derivative(comp, g, j, accuracy);
    }
    // C_{ki} = d_k v_i - d_i v_k;  weighted flux F^{jm} = r^{1+1/k} (H C H)^{jm}.
    VectorField3D out(3 * N, 0.0);
    std::array<std::vector<double>, 3> flux;
    for (int m = 0; m < 3; ++m) {
        for (int j = 0; j < 3; ++j) {
            flux[j].assign(N, 0.0);
            for (int id = 0; id < N; ++id) {
                double acc = 0.0;
                for (int k = 0; k < 3; ++k)
                    for (int i = 0; i < 3; ++i) {
                        const double c = dv[k][i][id] - dv[i][k][id];
                        acc += s.frame[id].H[j][k] * c * s.frame[id].H[i][m];
                    }
                flux[j][id] = std::pow(s.r[id], 1.0 + 1.0 / kappa) * acc;
            }
        }
        std::vector<double> div(N, 0.0);
        for (int j = 0; j < 3; ++j) {
            const auto dflux = axis_derivative(flux[j], g, j, accuracy);
            for (int id = 0; id < N; ++id) div[id] += dflux[id];
        }
        for (int id = 0; id < N; ++id)
            out[m * N + id] =
                (kappa + 1.0) * std::pow(s.r[id], -1.0 / kappa) * div[id];
    }
    return out;
}

DiscreteOperator assemble_l1hat_3d(const EllipticBackground3D& bg, const Grid3D& g,
                                   double kappa) {
    const int N = g.size();
    const auto s = sample_background(bg, g);
    const double vol = g.h * g.h * g.h;
    DiscreteOperator op;
    op.sigma = 0.5 * (1.0 / kappa - 1.0);
    op.block = 1;
    op.boundary_handling = "node-based symmetric assembly, natural boundaries";

    std::array<SpMat, 3> D;
    for (int a = 0; a < 3; ++a) D[a] = derivative_matrix(g, a);
    SpMat S(N, N);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            Eigen::VectorXd w(N);
            for (int id = 0; id < N; ++id)
                w(id) = (kappa + 1.0) * vol * std::pow(s.r[id], 1.0 / kappa) *
                        s.frame[id].H[a][b];
            S += SpMat(D[a].transpose() * diag_sparse(w) * D[b]);
        }
    op.S = 0.5 * (SpMat(S.transpose()) + S);  // exact symmetrization of roundoff

    Eigen::VectorXd nv(N), niv(N);
    for (int id = 0; id < N; ++id) {
        nv(id) = vol * std::pow(s.r[id], 2.0 * op.sigma);
        niv(id) = 1.0 / nv(id);
    }
    op.N = diag_sparse(nv);
    op.Ninv = diag_sparse(niv);
    return op;
}

DiscreteOperator assemble_l23hat_3d(const EllipticBackground3D& bg, const Grid3D& g,
                                    double kappa) {
    const int N = g.size();
    const auto s = sample_background(bg, g);
    const double vol = g.h * g.h * g.h;
    DiscreteOperator op;
    op.sigma = 0.5 / kappa;
    op.block = 3;
    op.boundary_handling = "node-based symmetric assembly, natural boundaries";

    std::array<SpMat, 3> D;
    for (int a = 0; a < 3; ++a) D[a] = derivative_matrix(g, a);

    // Divergence part: G v = sum_{a,c} D_a diag(r^{1/k} H^{ac}) P_c.
    SpMat G(N, 3 * N);
    {
        std::vector<Eigen::Triplet<double>> gt;
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c) {
                Eigen::VectorXd w(N);
                for (int id = 0; id < N; ++id)
                    w(id) = std::pow(s.r[id], 1.0 / kappa) * s.frame[id].H[a][c];
                SpMat part = D[a] * diag_sparse(w);
                for (int k = 0; k < part.outerSize(); ++k)
                    for (SpMat::InnerIterator it(part, k); it; ++it)
                        gt.emplace_back(it.row(), c * N + it.col(), it.value());
            }
        G.setFromTriplets(gt.begin(), gt.end());
    }
    Eigen::VectorXd wdiv(N);
    for (int id = 0; id < N; ++id)
        wdiv(id) = (kappa + 1.0) * vol * std::pow(s.r[id], 1.0 - 1.0 / kappa);
    SpMat S = SpMat(G.transpose() * diag_sparse(wdiv) * G);

    // Curl part: omega_a = eps_{aki} d_k v_i; weight vol r^{1+1/k} cof(H).
    SpMat R(3 * N, 3 * N);
    {
        std::vector<Eigen::Triplet<double>> rt;
        auto add_block = [&](int arow, SpMat m, int ccol, double sign) {
            for (int k = 0; k < m.outerSize(); ++k)
                for (SpMat::InnerIterator it(m, k); it; ++it)
                    rt.emplace_back(arow * N + it.row(), ccol * N + it.col(),
                                    sign * it.value());
        };
        add_block(0, D[1], 2, 1.0);   // w1 = d2 v3 - d3 v2
        add_block(0, D[2], 1, -1.0);
        add_block(1, D[2], 0, 1.0);   // w2 = d3 v1 - d1 v3
        add_block(1, D[0], 2, -1.0);
        add_block(2, D[0], 1, 1.0);   // w3 = d1 v2 - d2 v1
        add_block(2, D[1], 0, -1.0);
        R.setFromTriplets(rt.begin(), rt.end());
    }
    SpMat Wcof(3 * N, 3 * N);
    {
        std::vector<Eigen::Triplet<double>> wt;
        for (int id = 0; id < N; ++id) {
            const double base = (kappa + 1.0) * vol * std::pow(s.r[id], 1.0 + 1.0 / kappa);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    wt.emplace_back(a * N + id, b * N + id, base * s.frame[id].cof[a][b]);
        }
        Wcof.setFromTriplets(wt.begin(), wt.end());
    }
    S += SpMat(R.transpose() * Wcof * R);
    op.S = 0.5 * (SpMat(S.transpose()) + S);

    // Mass: vol r^{1/k} H per node (SPD 3x3 blocks); inverse blocks closed-form.
    {
        std::vector<Eigen::Triplet<double>> nt, nit;
        for (int id = 0; id < N; ++id) {
            const double base = vol * std::pow(s.r[id], 2.0 * op.sigma);
            Eigen::Matrix3d Hm;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) Hm(a, b) = s.frame[id].H[a][b];
            const Eigen::Matrix3d Hinv = Hm.inverse();
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    nt.emplace_back(a * N + id, b * N + id, base * Hm(a, b));
                    nit.emplace_back(a * N + id, b * N + id, Hinv(a, b) / base);
                }
        }
        op.N.resize(3 * N, 3 * N);
        op.N.setFromTriplets(nt.begin(), nt.end());
        op.Ninv.resize(3 * N, 3 * N);
        op.Ninv.setFromTriplets(nit.begin(), nit.end());
    }
    return op;
}

double curl_annihilation_residual(const VectorField3D& grad_phi,
                                  const EllipticBackground3D& bg, const Grid3D& g,
                                  double kappa, int accuracy) {
    const VectorField3D out = apply_L3_tilde_3d(grad_phi, bg, g, kappa, accuracy);
    double mx = 0.0;
    for (double v : out) mx = std::max(mx, std::abs(v));
    return mx;
}

}  // namespace islab
