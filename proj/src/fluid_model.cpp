#include "islab/fluid_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "islab/errors.hpp"

namespace islab {

ModelConstants ModelConstants::defaults(double kappa, double lambda0, int dim) {
    if (kappa <= 0.0) throw domain_error("kappa must be positive");
    ModelConstants c;
    c.kappa = kappa;
    c.tau_pi = kappa / (2.0 * kappa + 1.0);  // 1/(2 + 1/kappa)
    const double q = 2.0 * kappa + 1.0;
    c.zeta_fn = [q](double rho) { return std::pow(rho, q); };
    c.zeta_prime_fn = [q](double rho) { return q * std::pow(rho, q - 1.0); };
    c.lambda_fn = [lambda0](double rho) { return lambda0 / (1.0 + rho); };
    c.lambda_prime_fn = [lambda0](double rho) {
        return -lambda0 / ((1.0 + rho) * (1.0 + rho));
    };
    c.dim = dim;
    return c;
}

double ModelConstants::pressure(double rho) const { return std::pow(rho, kappa + 1.0); }

double ModelConstants::dp_drho(double rho) const {
    return (kappa + 1.0) * std::pow(rho, kappa);
}

double ModelConstants::zeta_of_r(double r) const {
    return zeta_fn(std::pow(r, 1.0 / kappa));
}

double ModelConstants::zeta_prime_of_r(double r) const {
    return zeta_prime_fn(std::pow(r, 1.0 / kappa));
}

double ModelConstants::lambda_of_r(double r) const {
    return lambda_fn(std::pow(r, 1.0 / kappa));
}

double ModelConstants::lambda_prime_of_r(double r) const {
    return lambda_prime_fn(std::pow(r, 1.0 / kappa));
}

void check_transport_bounds(const ModelConstants& c, double rho_lo, double rho_hi,
                            int samples) {
    if (!(rho_lo > 0.0) || !(rho_hi > rho_lo)) throw domain_error("bad rho range");
    const double q = 2.0 * c.kappa + 1.0;
    double ratio_min = 1e300, ratio_max = 0.0, dlam_max = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double rho = rho_lo + (rho_hi - rho_lo) * (i + 0.5) / samples;
        const double ratio = c.zeta_fn(rho) / std::pow(rho, q);
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
        const double drho = 1e-6 * (1.0 + rho);
        const double dlam = (c.lambda_fn(rho + drho) - c.lambda_fn(rho - drho)) / (2 * drho);
        dlam_max = std::max(dlam_max, std::abs(dlam));
    }
    if (!(ratio_min > 0.0) || !std::isfinite(ratio_max))
        throw domain_error("zeta(rho)/rho^{2k+1} not bounded above and below on range");
    if (!std::isfinite(dlam_max))
        throw domain_error("lambda has unbounded derivative on range");
}

Vec4 normalize_velocity(const std::array<double, 3>& spatial) {
    const double s2 =
        spatial[0] * spatial[0] + spatial[1] * spatial[1] + spatial[2] * spatial[2];
    return {std::sqrt(1.0 + s2), spatial[0], spatial[1], spatial[2]};
}

std::vector<Vec4> normalize_velocity(std::span<const std::array<double, 3>> spatial) {
    std::vector<Vec4> out(spatial.size());
    for (std::size_t i = 0; i < spatial.size(); ++i) out[i] = normalize_velocity(spatial[i]);
    return out;
}

Mat4 projection_tensor(const Vec4& u) {
    const double residual = std::abs(minkowski_dot(u, u) + 1.0);
    if (residual > 1e-8)
        throw domain_error("projection_tensor: unnormalized u, residual " +
                           std::to_string(residual));
    Mat4 d = zero_mat4();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            d[a][b] = (a == b ? metric_diag(a) : 0.0) + u[a] * u[b];
    return d;
}

Mat4 stress_energy(double rho, const Vec4& u, double Pi, const ModelConstants& c) {
    const Vec4 ul = lower_index(u);
    const double p = c.pressure(rho);
    Mat4 t = zero_mat4();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const double delta_lower = (a == b ? metric_diag(a) : 0.0) + ul[a] * ul[b];
            t[a][b] = rho * ul[a] * ul[b] + (p + Pi) * delta_lower;
        }
    return t;
}

TransformedState transform(const PrimitiveState& s, const ModelConstants& c) {
    TransformedState out;
    out.u = s.u;
    out.r.resize(s.rho.size());
    out.pi.resize(s.Pi.size());
    const double pi_exp = c.kappa / (2.0 * c.kappa + 1.0);
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        if (s.rho[i] < 0.0) throw domain_error("transform: negative energy density");
        out.r[i] = std::pow(s.rho[i], c.kappa);
    }
    for (std::size_t i = 0; i < s.Pi.size(); ++i) {
        if (s.Pi[i] < 0.0) throw domain_error("transform: negative bulk scalar");
        out.pi[i] = std::pow(s.Pi[i], pi_exp);
    }
    return out;
}

PrimitiveState inverse_transform(const TransformedState& s, const ModelConstants& c) {
    PrimitiveState out;
    out.u = s.u;
    out.rho.resize(s.r.size());
    out.Pi.resize(s.pi.size());
    const double pi_exp = (2.0 * c.kappa + 1.0) / c.kappa;
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        if (s.r[i] < 0.0) throw domain_error("inverse_transform: negative r");
        out.rho[i] = std::pow(s.r[i], 1.0 / c.kappa);
    }
    for (std::size_t i = 0; i < s.pi.size(); ++i) {
        if (s.pi[i] < 0.0) throw domain_error("inverse_transform: negative pi");
        out.Pi[i] = std::pow(s.pi[i], pi_exp);
    }
    return out;
}

CoefficientValues coefficients_at(double r, double pi, const ModelConstants& c) {
    if (r < kRMin || pi < kRMin)
        throw degeneracy_error("coefficients_at: r or pi below working range (r=" +
                               std::to_string(r) + ", pi=" + std::to_string(pi) + ")");
    CoefficientValues v;
    const double inv_k = 1.0 / c.kappa;
    v.a0 = pi / r;
    v.a1 = r + 1.0 + r * r * std::pow(v.a0, 2.0 + inv_k);
    v.a2 = 1.0 / v.a1;
    v.a3 = std::pow(v.a0, 1.0 + inv_k) * v.a2;
    v.a4 = c.zeta_of_r(r) / (r * std::pow(pi, 1.0 + inv_k));
    return v;
}

CoefficientSet coefficients(const TransformedState& s, const ModelConstants& c,
                            const std::vector<std::uint8_t>* mask) {
    const std::size_t n = s.r.size();
    CoefficientSet out;
    out.a0.assign(n, 0.0);
    out.a1.assign(n, 0.0);
    out.a2.assign(n, 0.0);
    out.a3.assign(n, 0.0);
    out.a4.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (mask && !(*mask)[i]) continue;
        const CoefficientValues v = coefficients_at(s.r[i], s.pi[i], c);
        out.a0[i] = v.a0;
        out.a1[i] = v.a1;
        out.a2[i] = v.a2;
        out.a3[i] = v.a3;
        out.a4[i] = v.a4;
    }
    return out;
}

double causality_margin(double rho, double Pi, const ModelConstants& c) {
    if (rho == 0.0 && Pi == 0.0) return 1.0;  // vacuum limit: every term vanishes
    const double enthalpy = rho + c.pressure(rho) + Pi;
    if (!(enthalpy > 0.0))
        throw degeneracy_error("causality_margin: rho + p + Pi must be positive");
    return (1.0 - c.dp_drho(rho)) - c.zeta_fn(rho) / c.tau_pi / enthalpy;
}

Vec4 four_acceleration(double r, double pi, const Vec4& u, const Vec4& grad_r,
                       const Vec4& grad_pi, const ModelConstants& c) {
    const double inv_k = 1.0 / c.kappa;
    const double denom =
        std::pow(r, 1.0 + inv_k) + std::pow(r, inv_k) + std::pow(pi, 2.0 + inv_k);
    if (!(denom > 0.0))
        throw degeneracy_error("four_acceleration: vanishing rho + p + Pi");
    const Mat4 delta = projection_tensor(u);
    const double cr = (1.0 + inv_k) * std::pow(r, inv_k);
    const double cp = (2.0 + inv_k) * std::pow(pi, 1.0 + inv_k);
    Vec4 a{};
    for (int al = 0; al < 4; ++al) {
        double s = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            s += delta[al][mu] * (cr * grad_r[mu] + cp * grad_pi[mu]);
        a[al] = -s / denom;
    }
    return a;
}

BoundaryClass classify_boundary(double sigma, double eta, double kappa) {
    if (!(sigma > 0.0) || !(eta > 0.0) || !(kappa > 0.0))
        throw domain_error("classify_boundary: exponents must be positive");
    constexpr double tol = 1e-9;
    if (sigma > eta + tol) return BoundaryClass::unbounded;
    const double e1 = sigma * kappa - 1.0;  // from the pressure-gradient term
    const double e2 = eta - sigma - 1.0;    // from the viscous-stress term
    const double emin = std::min(e1, e2);
    if (emin < -tol) return BoundaryClass::unbounded;
    if (emin > tol) return BoundaryClass::zero;
    return BoundaryClass::bounded_nonzero;
}

const char* to_string(BoundaryClass c) {
    switch (c) {
        case BoundaryClass::bounded_nonzero: return "bounded-nonzero";
        case BoundaryClass::zero: return "zero";
        case BoundaryClass::unbounded: return "unbounded";
    }
    return "?";
}

DecayFit fit_decay_exponent(std::span<const double> field, std::span<const double> d) {
    if (field.size() != d.size() || field.size() < 8)
        throw domain_error("fit_decay_exponent: need >= 8 paired samples");
    const std::size_t n = field.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(field[i] > 0.0) || !(d[i] > 0.0))
            throw domain_error("fit_decay_exponent: nonpositive sample");
        const double x = std::log(d[i]);
        const double y = std::log(field[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30)
        throw domain_error("fit_decay_exponent: degenerate abscissae");
    DecayFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = std::log(field[i]) - (intercept + fit.exponent * std::log(d[i]));
        ss += resid * resid;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

}  // namespace islab
