// SPDX-License-Identifier: MIT
#pragma once

#include "calabiglue/tensor_core.hpp"

#include <complex>

namespace calabiglue {

// Parameters of the Ricci-flat Kaehler ALE metric on O(-n) -> P^{n-1}.
// The integration constant of the potential ODE is fixed to a = 1; n = 2
// reproduces the Eguchi-Hanson metric.
struct CalabiParams {
    int n = 3;
    double a = 1.0;

    CalabiParams() = default;
    explicit CalabiParams(int n_) : n(n_) {
        if (n_ < 2) throw bad_argument("CalabiParams: complex dimension n must be >= 2");
    }
    int real_dim() const { return 2 * n; }
};

// ---- Kaehler potential -----------------------------------------------------

// F'(u) and F''(u) for the potential solving the Monge-Ampere ODE, a = 1:
//   F'(u)  = (1 + u^n)^{1/n} / u
//   F''(u) = u^{n-2} (1 + u^n)^{(1-n)/n} - (1 + u^n)^{1/n} / u^2
struct PotentialDerivs {
    double fp = 0;
    double fpp = 0;
};

inline PotentialDerivs potential_derivs(double u, const CalabiParams& p) {
    if (!(u > 0)) throw bad_argument("potential_derivs: u must be positive");
    const double n = p.n;
    double un = std::pow(u, n);
    double opu = 1.0 + un;
    PotentialDerivs d;
    d.fp = std::pow(opu, 1.0 / n) / u;
    d.fpp = std::pow(u, n - 2.0) * std::pow(opu, (1.0 - n) / n) - std::pow(opu, 1.0 / n) / (u * u);
    return d;
}

// | (F')^{n-1} (F' + u F'') - 1 |.  F' + u F'' is grouped algebraically as
// u^{n-1} (1+u^n)^{(1-n)/n}: composing the separately rounded F', F'' loses
// ~u^{-n} digits to cancellation near u = 0.
inline double monge_ampere_residual(double u, const CalabiParams& p) {
    PotentialDerivs d = potential_derivs(u, p);
    const double n = p.n;
    double fppu = std::pow(u, n - 1.0) * std::pow(1.0 + std::pow(u, n), (1.0 - n) / n);
    double det = std::pow(d.fp, n - 1.0) * fppu;
    return std::abs(det - 1.0);
}

// ---- metric components --------------------------------------------------------

// Hermitian components g_{i jbar} = delta_ij F'(u) + z^j conj(z^i) F''(u), u = |z|^2.
inline Eigen::MatrixXcd calabi_complex_components(const Eigen::VectorXcd& z,
                                                  const CalabiParams& p) {
    if (z.size() != p.n) throw bad_argument("calabi_complex_components: z must lie in C^n");
    double u = z.squaredNorm();
    if (!(u > 0)) throw bad_argument("calabi_complex_components: z must be nonzero");
    PotentialDerivs d = potential_derivs(u, p);
    Eigen::MatrixXcd g(p.n, p.n);
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j) {
            std::complex<double> v = (i == j) ? std::complex<double>(d.fp, 0) : 0.0;
            v += z[j] * std::conj(z[i]) * d.fpp;
            g(i, j) = v;
        }
    return g;
}

// Real metric components on R^{2n} (z^k = x^{2k} + i x^{2k+1}, 0-based):
// g_ab = Re( g_{i jbar} dz^i(e_a) conj(dz^j(e_b)) ). Normalized so the metric
// tends to g_euc at infinity.
inline Mat calabi_real_components(const Vec& x, const CalabiParams& p) {
    const int n = p.n;
    const int m = 2 * n;
    if (x.size() != m) throw bad_argument("calabi_real_components: wrong dimension");
    Eigen::VectorXcd z(n);
    for (int k = 0; k < n; ++k) z[k] = std::complex<double>(x[2 * k], x[2 * k + 1]);
    Eigen::MatrixXcd gc = calabi_complex_components(z, p);

    Mat g(m, m);
    const std::complex<double> I(0, 1);
    for (int a = 0; a < m; ++a) {
        int ia = a / 2;
        std::complex<double> wa = (a % 2 == 0) ? std::complex<double>(1, 0) : I;
        for (int b = a; b < m; ++b) {
            int ib = b / 2;
            std::complex<double> wb = (b % 2 == 0) ? std::complex<double>(1, 0) : I;
            double val = std::real(gc(ia, ib) * wa * std::conj(wb));
            g(a, b) = val;
            g(b, a) = val;
        }
    }
    return g;
}

// ALE chart in real coordinates, positive orthant box (keeps the cone point
// out of the domain).
inline ChartMetric calabi_ale_chart(const CalabiParams& p, double lo = 0.05, double hi = 120.0) {
    ChartMetric c;
    c.dim = p.real_dim();
    c.lo = Vec::Constant(c.dim, lo);
    c.hi = Vec::Constant(c.dim, hi);
    c.components = [p](const Vec& x) { return calabi_real_components(x, p); };
    c.regularity_scale = 1.0;
    c.name = "calabi-ale-n" + std::to_string(p.n);
    return c;
}

// ---- frame quantities ------------------------------------------------------------

// A(r) = r^{n-1} (1+r^{2n})^{-(n-1)/(2n)},  B(r) = (1+r^{2n})^{1/n},
// C(r) = r^n (1+r^{2n})^{(1-n)/(2n)}; the metric in radial form is
//   g = A^2 dr x dr + B g_FS + C^2 theta x theta.
struct FrameQuantities {
    double A = 0, B = 0, C = 0;
};

inline FrameQuantities frame_quantities(double r, const CalabiParams& p) {
    if (!(r > 0)) throw bad_argument("frame_quantities: r must be positive");
    const double n = p.n;
    double r2n = std::pow(r, 2.0 * n);
    FrameQuantities f;
    f.A = std::pow(r, n - 1.0) * std::pow(1.0 + r2n, -(n - 1.0) / (2.0 * n));
    f.B = std::pow(1.0 + r2n, 1.0 / n);
    f.C = std::pow(r, n) * std::pow(1.0 + r2n, (1.0 - n) / (2.0 * n));
    return f;
}

// ---- radial chart -----------------------------------------------------------------

// Coordinates y = (r, psi, xi_1, eta_1, ..., xi_{n-1}, eta_{n-1}) where
// zeta = xi + i eta is the affine Fubini-Study chart on P^{n-1} and psi the
// Hopf fiber angle. theta = dpsi + Im(conj(zeta) . dzeta) / (1+|zeta|^2).
inline Mat calabi_radial_components(const Vec& y, const CalabiParams& p) {
    const int n = p.n;
    const int m = 2 * n;
    double r = y[0];
    FrameQuantities f = frame_quantities(r, p);

    Eigen::VectorXcd zeta(n - 1);
    for (int k = 0; k < n - 1; ++k) zeta[k] = std::complex<double>(y[2 + 2 * k], y[3 + 2 * k]);
    double q = 1.0 + zeta.squaredNorm();

    // theta covector in chart coordinates
    Vec theta = Vec::Zero(m);
    theta[1] = 1.0;
    for (int k = 0; k < n - 1; ++k) {
        // Im(conj(zeta_k) dzeta_k) = xi_k d(eta_k) - eta_k d(xi_k)
        theta[2 + 2 * k] = -std::imag(zeta[k]) / q;
        theta[3 + 2 * k] = std::real(zeta[k]) / q;
    }

    // Fubini-Study block: FS_{i jbar} = (q delta_ij - conj(zeta_i) zeta_j) / q^2
    Mat fs = Mat::Zero(m, m);
    const std::complex<double> I(0, 1);
    for (int a = 0; a < 2 * (n - 1); ++a) {
        int ia = a / 2;
        std::complex<double> wa = (a % 2 == 0) ? std::complex<double>(1, 0) : I;
        for (int b = a; b < 2 * (n - 1); ++b) {
            int ib = b / 2;
            std::complex<double> wb = (b % 2 == 0) ? std::complex<double>(1, 0) : I;
            std::complex<double> fsc =
                ((ia == ib ? q : 0.0) - std::conj(zeta[ia]) * zeta[ib]) / (q * q);
            double val = std::real(fsc * wa * std::conj(wb));
            fs(2 + a, 2 + b) = val;
            fs(2 + b, 2 + a) = val;
        }
    }

    Mat g = Mat::Zero(m, m);
    g(0, 0) = f.A * f.A;
    g += f.C * f.C * theta * theta.transpose();
    g += f.B * fs;
    return g;
}

inline ChartMetric calabi_radial_chart(const CalabiParams& p, double r_lo = 0.1,
                                       double r_hi = 10.0) {
    if (!(r_lo > 0)) throw bad_argument("calabi_radial_chart: domain must have r > 0");
    ChartMetric c;
    c.dim = p.real_dim();
    c.lo = Vec::Constant(c.dim, -0.8);
    c.hi = Vec::Constant(c.dim, 0.8);
    c.lo[0] = r_lo;
    c.hi[0] = r_hi;
    c.lo[1] = -M_PI;
    c.hi[1] = M_PI;
    c.components = [p](const Vec& y) { return calabi_radial_components(y, p); };
    c.regularity_scale = 1.0;
    c.name = "calabi-radial-n" + std::to_string(p.n);
    return c;
}

// Hopf parametrization: (r, psi, zeta) -> z = r e^{i psi} (1, zeta)/sqrt(1+|zeta|^2),
// returned as a real point in R^{2n}. Used to compare the two chart forms.
inline Vec hopf_embed(const Vec& y, const CalabiParams& p) {
    const int n = p.n;
    Eigen::VectorXcd zeta(n - 1);
    for (int k = 0; k < n - 1; ++k) zeta[k] = std::complex<double>(y[2 + 2 * k], y[3 + 2 * k]);
    double q = std::sqrt(1.0 + zeta.squaredNorm());
    std::complex<double> phase = std::polar(y[0] / q, y[1]);
    Vec x(2 * n);
    x[0] = std::real(phase);
    x[1] = std::imag(phase);
    for (int k = 0; k < n - 1; ++k) {
        std::complex<double> zk = phase * zeta[k];
        x[2 + 2 * k] = std::real(zk);
        x[3 + 2 * k] = std::imag(zk);
    }
    return x;
}

// ---- ALE decay --------------------------------------------------------------------

struct DecayFit {
    double slope = 0;
    double intercept = 0;
    bool degenerate = false;
    std::vector<double> radii;
    std::vector<double> sup_diff;
};

// Log-log slope of sup |g(x) - g_euc| over sample directions at each radius.
// For the metric itself the expected slope is -2n. A generic m x m component
// function can be passed for cross-checks (e.g. the Euclidean metric gives a
// degenerate fit).
inline DecayFit ale_decay_fit(const std::function<Mat(const Vec&)>& components, int m,
                              const std::vector<double>& radii, int directions = 6,
                              uint64_t seed = 7) {
    if (radii.size() < 8) throw bad_argument("ale_decay_fit: need at least 8 radii");
    for (double r : radii)
        if (!(r >= 2.0)) throw bad_argument("ale_decay_fit: radii must be >= 2");

    Rng rng(seed);
    std::vector<Vec> dirs;
    for (int d = 0; d < directions; ++d) {
        Vec v = rng.sphere_point(m);
        for (int i = 0; i < m; ++i) v[i] = std::abs(v[i]) + 0.25;  // keep off the axes
        dirs.push_back(v / v.norm());
    }

    DecayFit out;
    out.radii = radii;
    for (double r : radii) {
        double sup = 0;
        for (const Vec& d : dirs) {
            Mat diff = components(r * d) - Mat::Identity(m, m);
            sup = std::max(sup, diff.cwiseAbs().maxCoeff());
        }
        out.sup_diff.push_back(sup);
    }
    LogLogFit fit = loglog_fit(out.radii, out.sup_diff);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.degenerate = fit.degenerate;
    return out;
}

inline DecayFit ale_decay_fit(const CalabiParams& p, const std::vector<double>& radii) {
    return ale_decay_fit([p](const Vec& x) { return calabi_real_components(x, p); }, p.real_dim(),
                         radii);
}

}  // namespace calabiglue
