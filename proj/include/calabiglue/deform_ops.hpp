// SPDX-License-Identifier: MIT
#pragma once

#include "calabiglue/calabi.hpp"
#include "calabiglue/tensor_core.hpp"

namespace calabiglue {

// Standard complex structure on R^{2n}: J(e_{2k}) = e_{2k+1}, J(e_{2k+1}) = -e_{2k}.
// Entry (b,a) is the b-component of J(e_a).
inline Mat standard_J(int m) {
    if (m % 2 != 0) throw bad_argument("standard_J: dimension must be even");
    Mat J = Mat::Zero(m, m);
    for (int k = 0; k < m / 2; ++k) {
        J(2 * k + 1, 2 * k) = 1.0;
        J(2 * k, 2 * k + 1) = -1.0;
    }
    return J;
}

// Radial covector (dr)_a = x_a / r.
inline Vec radial_covector(const Vec& x) { return x / x.norm(); }

// theta = -J(dr)/r, the Hopf fiber covector: theta_a = -x_b J^b_a / r^2.
inline Vec theta_covector(const Vec& x) {
    Mat J = standard_J(static_cast<int>(x.size()));
    double r2 = x.squaredNorm();
    return -(J.transpose() * x) / r2;
}

// ---- closed-form fields on the ALE chart -------------------------------------

// The decaying infinitesimal Einstein deformation of the Calabi metric:
//   o = (1 + r^{2n})^{-1} ( -g_cal + n A^2 dr x dr + n C^2 theta x theta ).
inline Mat o_components(const Vec& x, const CalabiParams& p) {
    const int n = p.n;
    double r = x.norm();
    FrameQuantities f = frame_quantities(r, p);
    Vec er = radial_covector(x);
    Vec th = theta_covector(x);
    double s = 1.0 / (1.0 + std::pow(r, 2.0 * n));
    Mat g = calabi_real_components(x, p);
    return s * (-g + n * f.A * f.A * er * er.transpose() + n * f.C * f.C * th * th.transpose());
}

inline TensorField o_field(const CalabiParams& p) {
    TensorField t;
    t.rank = 2;
    t.kind = FieldKind::Symmetric;
    t.comp = [p](const Vec& x) { return from_matrix(o_components(x, p)); };
    return t;
}

// Euclidean limit tensor o_euc = r^{-2n} ( -g_euc + n dr x dr + n r^2 theta x theta ).
inline Mat o_euc_components(const Vec& x, int n) {
    double r = x.norm();
    Vec er = radial_covector(x);
    Vec th = theta_covector(x);
    int m = 2 * n;
    Mat o = -Mat::Identity(m, m) + n * er * er.transpose() + n * (r * r) * th * th.transpose();
    return std::pow(r, -2.0 * n) * o;
}

// Horizontal lift of the Fubini-Study 2-form: omega = (omega_euc - r dr ^ theta)/r^2,
// with omega_euc(e_a, e_b) = <J e_a, e_b>. Satisfies d(theta) = 2 omega.
inline Mat fs_form_components(const Vec& x) {
    const int m = static_cast<int>(x.size());
    Mat J = standard_J(m);
    double r = x.norm();
    Vec er = radial_covector(x);
    Vec th = theta_covector(x);
    Mat w_euc = J.transpose();  // w(a,b) = J^b_a
    Mat wedge = er * th.transpose() - th * er.transpose();
    return (w_euc - r * wedge) / (r * r);
}

// The decaying harmonic (1,1)-form:
//   Omega = (1-n)/(1+r^{2n}) A C dr ^ theta + (1+r^{2n})^{-1} B omega.
// `corrupt` replaces the coefficient (1-n) by n (negative control).
inline Mat omega_form_components(const Vec& x, const CalabiParams& p, bool corrupt = false) {
    const int n = p.n;
    double r = x.norm();
    FrameQuantities f = frame_quantities(r, p);
    double s = 1.0 / (1.0 + std::pow(r, 2.0 * n));
    Vec er = radial_covector(x);
    Vec th = theta_covector(x);
    double c1 = corrupt ? static_cast<double>(n) : (1.0 - n);
    Mat wedge = er * th.transpose() - th * er.transpose();
    return c1 * s * f.A * f.C * wedge + s * f.B * fs_form_components(x);
}

inline TensorField omega_field(const CalabiParams& p, bool corrupt = false) {
    TensorField t;
    t.rank = 2;
    t.kind = FieldKind::Alternating;
    t.comp = [p, corrupt](const Vec& x) {
        return from_matrix(omega_form_components(x, p, corrupt));
    };
    return t;
}

// o(.,.) = Omega(J., .), the deformation tensor rebuilt from the harmonic form.
inline Mat o_from_omega(const CalabiParams& p, const Vec& x) {
    Mat Om = omega_form_components(x, p);
    Mat J = standard_J(p.real_dim());
    Mat o(p.real_dim(), p.real_dim());
    for (int a = 0; a < p.real_dim(); ++a)
        for (int b = 0; b < p.real_dim(); ++b) {
            double s = 0;
            for (int c = 0; c < p.real_dim(); ++c) s += J(c, a) * Om(c, b);
            o(a, b) = s;
        }
    return o;
}

// ---- operator zoo -------------------------------------------------------------

// delta(h)_i = -g^{jk} nabla_j h_{ki}, for a symmetric 2-tensor field.
inline Vec divergence(const TensorField& h, const ChartMetric& c, const Vec& p, double step,
                      int fd_order = 2) {
    if (h.rank != 2) throw valence_mismatch("divergence: symmetric 2-tensor field required");
    const int m = c.dim;
    NTensor dh = covariant_derivative(h, c, p, step, fd_order);  // (a; i j)
    Mat ginv = inverse_metric(c, p);
    Vec out = Vec::Zero(m);
    for (int i = 0; i < m; ++i) {
        double s = 0;
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) s += ginv(j, k) * dh(j, k, i);
        out[i] = -s;
    }
    return out;
}

// delta(w) = -g^{ij} nabla_i w_j, for a one-form field.
inline double divergence_oneform(const TensorField& w, const ChartMetric& c, const Vec& p,
                                 double step, int fd_order = 2) {
    if (w.rank != 1) throw valence_mismatch("divergence_oneform: one-form field required");
    NTensor dw = covariant_derivative(w, c, p, step, fd_order);
    Mat ginv = inverse_metric(c, p);
    double s = 0;
    for (int i = 0; i < c.dim; ++i)
        for (int j = 0; j < c.dim; ++j) s += ginv(i, j) * dw(i, j);
    return -s;
}

// delta*(w)_ij = 1/2 (nabla_i w_j + nabla_j w_i).
inline Mat delta_star(const TensorField& w, const ChartMetric& c, const Vec& p, double step,
                      int fd_order = 2) {
    if (w.rank != 1) throw valence_mismatch("delta_star: one-form field required");
    NTensor dw = covariant_derivative(w, c, p, step, fd_order);
    Mat out(c.dim, c.dim);
    for (int i = 0; i < c.dim; ++i)
        for (int j = 0; j < c.dim; ++j) out(i, j) = 0.5 * (dw(i, j) + dw(j, i));
    return out;
}

// K(w) = delta*(w) + (1/m) delta(w) g; trace-free by construction.
inline Mat conformal_killing_K(const TensorField& w, const ChartMetric& c, const Vec& p,
                               double step, int fd_order = 2) {
    Mat ds = delta_star(w, c, p, step, fd_order);
    double dv = divergence_oneform(w, c, p, step, fd_order);
    return ds + (dv / c.dim) * c.metric(p);
}

// B(h) = delta(h) + 1/2 d(tr_g h).
inline Vec bianchi_B(const TensorField& h, const ChartMetric& c, const Vec& p, double step,
                     int fd_order = 2) {
    Vec dv = divergence(h, c, p, step, fd_order);
    auto tr = [&](const Vec& q) {
        Mat ginv = inverse_metric(c, q);
        NTensor hv = h.comp(q);
        double s = 0;
        for (int a = 0; a < c.dim; ++a)
            for (int b = 0; b < c.dim; ++b) s += ginv(a, b) * hv(a, b);
        return s;
    };
    Vec dtr(c.dim);
    for (int d = 0; d < c.dim; ++d) dtr[d] = fd_partial_scalar(tr, p, d, step, fd_order);
    return dv + 0.5 * dtr;
}

// Second covariant derivative field: (a, b; i j) = nabla_a nabla_b h_{ij}.
inline NTensor second_covariant(const TensorField& h, const ChartMetric& c, const Vec& p,
                                double step, int fd_order = 2) {
    TensorField dh;
    dh.rank = h.rank + 1;
    dh.comp = [&h, &c, step, fd_order](const Vec& q) {
        return covariant_derivative(h, c, q, step, fd_order);
    };
    return covariant_derivative(dh, c, p, step, fd_order);
}

// nabla* nabla h = -g^{ab} nabla_a nabla_b h (negative rough Laplacian).
inline Mat rough_laplacian_neg(const TensorField& h, const ChartMetric& c, const Vec& p,
                               double step, int fd_order = 2) {
    if (h.rank != 2) throw valence_mismatch("rough_laplacian_neg: 2-tensor field required");
    NTensor d2 = second_covariant(h, c, p, step, fd_order);
    Mat ginv = inverse_metric(c, p);
    Mat out = Mat::Zero(c.dim, c.dim);
    for (int i = 0; i < c.dim; ++i)
        for (int j = 0; j < c.dim; ++j) {
            double s = 0;
            for (int a = 0; a < c.dim; ++a)
                for (int b = 0; b < c.dim; ++b) s += ginv(a, b) * d2(a, b, i, j);
            out(i, j) = -s;
        }
    return out;
}

struct LichnerowiczParts {
    Mat half_rough;  //  1/2 nabla*nabla h
    Mat ring_r;      //  ring-R(h)
    Mat P;           //  difference
};

// P(h) = 1/2 nabla*nabla h - ring-R(h).
inline LichnerowiczParts lichnerowicz_P_parts(const TensorField& h, const ChartMetric& c,
                                              const Vec& p, double step, int fd_order = 2) {
    require_interior(c, p, 6.0 * step);
    LichnerowiczParts out;
    out.half_rough = 0.5 * rough_laplacian_neg(h, c, p, step, fd_order);
    CurvatureBundle cb = curvature(c, p, step, fd_order);
    out.ring_r = ring_R(cb, to_matrix(h.comp(p)));
    out.P = out.half_rough - out.ring_r;
    return out;
}

inline Mat lichnerowicz_P(const TensorField& h, const ChartMetric& c, const Vec& p, double step,
                          int fd_order = 2) {
    return lichnerowicz_P_parts(h, c, p, step, fd_order).P;
}

// ---- exterior calculus on low-rank forms ------------------------------------------

// d of a one-form: (dw)_ab = d_a w_b - d_b w_a.
inline Mat exterior_d_oneform(const TensorField& w, const Vec& p, double step, int fd_order = 2) {
    const int m = static_cast<int>(p.size());
    auto flat = [&](const Vec& q) {
        NTensor t = w.comp(q);
        Eigen::Map<Eigen::VectorXd> v(t.v.data(), static_cast<long>(t.v.size()));
        return Eigen::VectorXd(v);
    };
    Mat out(m, m);
    std::vector<Eigen::VectorXd> d(m);
    for (int a = 0; a < m; ++a) d[a] = fd_partial(flat, p, a, step, fd_order);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) out(a, b) = d[a][b] - d[b][a];
    return out;
}

// d of a 2-form: (dw)_abc = d_a w_bc - d_b w_ac + d_c w_ab.
inline NTensor exterior_d_twoform(const TensorField& w, const Vec& p, double step,
                                  int fd_order = 2) {
    const int m = static_cast<int>(p.size());
    auto flat = [&](const Vec& q) {
        NTensor t = w.comp(q);
        Eigen::Map<Eigen::VectorXd> v(t.v.data(), static_cast<long>(t.v.size()));
        return Eigen::VectorXd(v);
    };
    std::vector<Eigen::VectorXd> d(m);
    for (int a = 0; a < m; ++a) d[a] = fd_partial(flat, p, a, step, fd_order);
    NTensor out(m, 3);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                out(a, b, c) = d[a][b * m + c] - d[b][a * m + c] + d[c][a * m + b];
    return out;
}

// Codifferential on a 2-form: (delta w)_c = -g^{ab} nabla_a w_bc.
inline Vec codifferential_twoform(const TensorField& w, const ChartMetric& c, const Vec& p,
                                  double step, int fd_order = 2) {
    NTensor dw = covariant_derivative(w, c, p, step, fd_order);
    Mat ginv = inverse_metric(c, p);
    Vec out = Vec::Zero(c.dim);
    for (int k = 0; k < c.dim; ++k) {
        double s = 0;
        for (int a = 0; a < c.dim; ++a)
            for (int b = 0; b < c.dim; ++b) s += ginv(a, b) * dw(a, b, k);
        out[k] = -s;
    }
    return out;
}

// ---- harmonic-form verification -----------------------------------------------------

struct OmegaReport {
    double max_d_rel = 0;      // sup |dOmega| / |Omega|
    double max_delta_rel = 0;  // sup |delta Omega| / |Omega|
    double decay_slope = 0;    // fitted slope of |Omega|_{g_cal} vs r
    bool pass = false;
};

inline OmegaReport verify_omega_harmonic(const CalabiParams& p, const std::vector<Vec>& points,
                                         double step = 1e-4, bool corrupt = false,
                                         double tol = 1e-6) {
    ChartMetric chart = calabi_ale_chart(p);
    TensorField Om = omega_field(p, corrupt);
    OmegaReport rep;
    for (const Vec& x : points) {
        double nOm = norm(chart, x, Om.comp(x), FieldKind::Alternating);
        NTensor dOm = exterior_d_twoform(Om, x, step, 4);
        Vec del = codifferential_twoform(Om, chart, x, step, 4);
        double nd = norm(chart, x, dOm, FieldKind::Alternating);
        NTensor delT(chart.dim, 1);
        for (int i = 0; i < chart.dim; ++i) delT(i) = del[i];
        double ndel = norm(chart, x, delT);
        rep.max_d_rel = std::max(rep.max_d_rel, nd / nOm);
        rep.max_delta_rel = std::max(rep.max_delta_rel, ndel / nOm);
    }
    // decay of |Omega| in the Calabi norm along a fixed generic direction
    Vec dir = Vec::Constant(chart.dim, 1.0);
    dir /= dir.norm();
    std::vector<double> radii, vals;
    for (double r = 2.0; r <= 64.0; r *= std::sqrt(2.0)) {
        radii.push_back(r);
        vals.push_back(norm(chart, r * dir, Om.comp(r * dir), FieldKind::Alternating));
    }
    LogLogFit fit = loglog_fit(radii, vals);
    rep.decay_slope = fit.slope;
    rep.pass = rep.max_d_rel < tol && rep.max_delta_rel < tol &&
               std::abs(rep.decay_slope + 2.0 * p.n) < 0.2;
    return rep;
}

}  // namespace calabiglue
