// SPDX-License-Identifier: MIT
#pragma once

#include "calabiglue/core.hpp"

#include <Eigen/Eigenvalues>

#include <functional>
#include <utility>

namespace calabiglue {

// A single coordinate chart with a closed-form metric. `components` must be a
// pure function: same point, same matrix.
struct ChartMetric {
    int dim = 0;
    Vec lo, hi;  // axis-aligned domain box
    std::function<Mat(const Vec&)> components;
    double regularity_scale = 1.0;
    std::string name;

    bool contains(const Vec& p, double margin = 0.0) const {
        if (p.size() != dim) return false;
        for (int i = 0; i < dim; ++i)
            if (p[i] < lo[i] + margin || p[i] > hi[i] - margin) return false;
        return true;
    }

    Mat metric(const Vec& p) const { return components(p); }

    double default_step() const { return 1e-3 * regularity_scale; }
};

inline void require_interior(const ChartMetric& c, const Vec& p, double margin) {
    if (!c.contains(p, margin))
        throw point_outside_domain("point outside chart domain (margin " + std::to_string(margin) +
                                   ") on chart " + c.name);
}

inline Mat inverse_metric(const ChartMetric& c, const Vec& p) {
    Mat g = c.metric(p);
    Eigen::FullPivLU<Mat> lu(g);
    if (!lu.isInvertible()) throw singular_metric("metric not invertible on chart " + c.name);
    return lu.inverse();
}

// Positive definiteness by eigenvalue test.
inline bool is_positive_definite(const Mat& g, double tol = 0.0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    return es.eigenvalues().minCoeff() > tol;
}

// ---- Christoffel symbols ---------------------------------------------------

// Gamma^k_{ij} = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij), central differences.
inline Tensor3 christoffel(const ChartMetric& c, const Vec& p, double step, int fd_order = 2) {
    const int m = c.dim;
    require_interior(c, p, 2.0 * step);
    Mat ginv = inverse_metric(c, p);

    std::vector<Mat> dg(m);
    for (int d = 0; d < m; ++d) dg[d] = fd_partial(c.components, p, d, step, fd_order);

    Tensor3 gamma(m);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                double s = 0;
                for (int l = 0; l < m; ++l)
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                gamma(k, i, j) = 0.5 * s;
                gamma(k, j, i) = 0.5 * s;
            }
    return gamma;
}

// ---- curvature ----------------------------------------------------------------

// All-lowered Riemann tensor, Ricci and scalar curvature at a point.
// Convention calibrated so that a space of constant sectional curvature c has
//   R_{ijkl} = c (g_ik g_jl - g_il g_jk),
// the unit round S^m has scalar curvature m(m-1), and ricci = g^{jl} R_{ijkl}.
struct CurvatureBundle {
    int dim = 0;
    Mat g, ginv;
    Tensor3 gamma;
    Tensor4 riemann;
    Mat ricci;
    double scalar = 0;

    // Max violation of the pair antisymmetries / pair swap.
    double symmetry_residual() const {
        double r = 0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                for (int k = 0; k < dim; ++k)
                    for (int l = 0; l < dim; ++l) {
                        double x = riemann(i, j, k, l);
                        r = std::max(r, std::abs(x + riemann(j, i, k, l)));
                        r = std::max(r, std::abs(x + riemann(i, j, l, k)));
                        r = std::max(r, std::abs(x - riemann(k, l, i, j)));
                    }
        return r;
    }

    // Max violation of R_{ijkl} + R_{jkil} + R_{kijl}.
    double first_bianchi_residual() const {
        double r = 0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                for (int k = 0; k < dim; ++k)
                    for (int l = 0; l < dim; ++l)
                        r = std::max(r, std::abs(riemann(i, j, k, l) + riemann(j, k, i, l) +
                                                 riemann(k, i, j, l)));
        return r;
    }

    // |ricci - g^{jl} R_{ijkl}| (self-consistency of the stored contraction).
    double ricci_contraction_residual() const {
        double r = 0;
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k) {
                double s = 0;
                for (int j = 0; j < dim; ++j)
                    for (int l = 0; l < dim; ++l) s += ginv(j, l) * riemann(i, j, k, l);
                r = std::max(r, std::abs(s - ricci(i, k)));
            }
        return r;
    }
};

inline CurvatureBundle curvature(const ChartMetric& c, const Vec& p, double step, int fd_order = 2) {
    const int m = c.dim;
    require_interior(c, p, 4.0 * step);

    CurvatureBundle out;
    out.dim = m;
    out.g = c.metric(p);
    out.ginv = inverse_metric(c, p);
    out.gamma = christoffel(c, p, step, fd_order);

    // dGamma[d] = d_d Gamma at p
    auto gamma_at = [&](const Vec& q) {
        Tensor3 t = christoffel(c, q, step, fd_order);
        Eigen::Map<Eigen::VectorXd> v(t.v.data(), static_cast<long>(t.v.size()));
        return Eigen::VectorXd(v);
    };
    std::vector<Tensor3> dgamma(m, Tensor3(m));
    for (int d = 0; d < m; ++d) {
        Eigen::VectorXd flat = fd_partial(gamma_at, p, d, step, fd_order);
        std::copy(flat.data(), flat.data() + flat.size(), dgamma[d].v.begin());
    }

    // R_{ijkl} = g_{km} ( d_i Gamma^m_{jl} - d_j Gamma^m_{il}
    //                     + Gamma^m_{ia} Gamma^a_{jl} - Gamma^m_{ja} Gamma^a_{il} )
    const Tensor3& G = out.gamma;
    Tensor4 riem(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    double s = 0;
                    for (int mm = 0; mm < m; ++mm) {
                        double term = dgamma[i](mm, j, l) - dgamma[j](mm, i, l);
                        for (int a = 0; a < m; ++a)
                            term += G(mm, i, a) * G(a, j, l) - G(mm, j, a) * G(a, i, l);
                        s += out.g(k, mm) * term;
                    }
                    riem(i, j, k, l) = s;
                }
        }
    out.riemann = riem;

    out.ricci = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
            double s = 0;
            for (int j = 0; j < m; ++j)
                for (int l = 0; l < m; ++l) s += out.ginv(j, l) * riem(i, j, k, l);
            out.ricci(i, k) = s;
        }
    out.scalar = (out.ginv * out.ricci).trace();
    return out;
}

// Curvature action on symmetric 2-tensors: ring-R(h)_{ij} = g^{kp} g^{lq} R_{ikjl} h_{pq}.
// ring-R(g) = Ric.
inline Mat ring_R(const CurvatureBundle& cb, const Mat& h) {
    const int m = cb.dim;
    Mat out = Mat::Zero(m, m);
    Mat hup = cb.ginv * h * cb.ginv;  // h^{kl}
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double s = 0;
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) s += cb.riemann(i, k, j, l) * hup(k, l);
            out(i, j) = s;
        }
    return out;
}

// ---- tensor fields and covariant differentiation -----------------------------------

enum class FieldKind { Generic, Symmetric, Alternating };

// Covariant (0,s) tensor field given by a closed-form component function.
struct TensorField {
    int rank = 0;  // number of lower indices
    FieldKind kind = FieldKind::Generic;
    std::function<NTensor(const Vec&)> comp;

    NTensor operator()(const Vec& p) const { return comp(p); }
};

inline TensorField scalar_field(std::function<double(const Vec&)> f) {
    TensorField t;
    t.rank = 0;
    t.comp = [f = std::move(f)](const Vec& p) {
        NTensor s(1, 0);
        s.v[0] = f(p);
        return s;
    };
    return t;
}

inline TensorField metric_field(const ChartMetric& c) {
    TensorField t;
    t.rank = 2;
    t.kind = FieldKind::Symmetric;
    t.comp = [&c](const Vec& p) { return from_matrix(c.metric(p)); };
    return t;
}

// (nabla T)(a; i1..is) = d_a T_{i1..is} - sum_r Gamma^c_{a i_r} T_{..c..}.
// The derivative index comes first in the result.
inline NTensor covariant_derivative(const TensorField& f, const ChartMetric& c, const Vec& p,
                                    double step, int fd_order = 2) {
    const int m = c.dim;
    require_interior(c, p, 2.0 * step);
    const int s = f.rank;
    NTensor val = f.comp(p);

    NTensor out(m, s + 1);
    // partial derivatives
    std::vector<NTensor> dT(m);
    auto comp_flat = [&](const Vec& q) {
        NTensor t = f.comp(q);
        Eigen::Map<Eigen::VectorXd> v(t.v.data(), static_cast<long>(t.v.size()));
        return Eigen::VectorXd(v);
    };
    for (int a = 0; a < m; ++a) {
        Eigen::VectorXd flat = fd_partial(comp_flat, p, a, step, fd_order);
        dT[a] = NTensor(m, s);
        if (s == 0) dT[a] = NTensor(1, 0);
        std::copy(flat.data(), flat.data() + flat.size(), dT[a].v.begin());
    }
    if (s == 0) {
        for (int a = 0; a < m; ++a) out.v[a] = dT[a].v[0];
        return out;
    }

    Tensor3 G = christoffel(c, p, step, fd_order);

    const size_t block = val.size();  // m^s
    std::vector<size_t> stride(s);
    {
        size_t st = 1;
        for (int r = s - 1; r >= 0; --r) {
            stride[r] = st;
            st *= m;
        }
    }
    std::vector<int> idx(s, 0);
    for (size_t flat = 0; flat < block; ++flat) {
        size_t rem = flat;
        for (int r = 0; r < s; ++r) {
            idx[r] = static_cast<int>(rem / stride[r]);
            rem %= stride[r];
        }
        for (int a = 0; a < m; ++a) {
            double x = dT[a].v[flat];
            for (int r = 0; r < s; ++r) {
                int ir = idx[r];
                for (int cidx = 0; cidx < m; ++cidx)
                    x -= G(cidx, a, ir) * val.v[flat + (cidx - ir) * stride[r]];
            }
            out.v[a * block + flat] = x;
        }
    }
    return out;
}

// Pointwise inner product of two (0,k) tensors, all indices raised with g.
// Alternating tensors are weighted by 1/k! so the Kaehler form of a metric
// has the norm of its diagonal model.
inline double inner(const ChartMetric& c, const Vec& p, const NTensor& t1, const NTensor& t2,
                    FieldKind kind = FieldKind::Generic) {
    if (t1.rank != t2.rank || t1.dim != t2.dim)
        throw valence_mismatch("inner: tensors of different valence");
    const int m = c.dim;
    Mat ginv = inverse_metric(c, p);
    const int k = t1.rank;
    if (k == 0) return t1.v[0] * t2.v[0];

    // raise all indices of t2
    NTensor up = t2;
    std::vector<size_t> stride(k);
    {
        size_t st = 1;
        for (int r = k - 1; r >= 0; --r) {
            stride[r] = st;
            st *= m;
        }
    }
    for (int r = 0; r < k; ++r) {
        NTensor next(m, k);
        std::vector<int> idx(k, 0);
        for (size_t flat = 0; flat < up.size(); ++flat) {
            size_t rem = flat;
            for (int q = 0; q < k; ++q) {
                idx[q] = static_cast<int>(rem / stride[q]);
                rem %= stride[q];
            }
            double s = 0;
            int ir = idx[r];
            for (int c2 = 0; c2 < m; ++c2) s += ginv(ir, c2) * up.v[flat + (c2 - ir) * stride[r]];
            next.v[flat] = s;
        }
        up = next;
    }
    double s = 0;
    for (size_t i = 0; i < t1.size(); ++i) s += t1.v[i] * up.v[i];
    if (kind == FieldKind::Alternating) s /= factorial(k);
    return s;
}

inline double inner(const ChartMetric& c, const Vec& p, const TensorField& f1,
                    const TensorField& f2) {
    if (f1.rank != f2.rank) throw valence_mismatch("inner: fields of different valence");
    FieldKind k = (f1.kind == FieldKind::Alternating && f2.kind == FieldKind::Alternating)
                      ? FieldKind::Alternating
                      : FieldKind::Generic;
    return inner(c, p, f1.comp(p), f2.comp(p), k);
}

inline double norm(const ChartMetric& c, const Vec& p, const NTensor& t,
                   FieldKind kind = FieldKind::Generic) {
    return std::sqrt(std::max(0.0, inner(c, p, t, t, kind)));
}

// ---- built-in charts ------------------------------------------------------------

inline ChartMetric euclidean_chart(int m, double half_width = 10.0) {
    ChartMetric c;
    c.dim = m;
    c.lo = Vec::Constant(m, -half_width);
    c.hi = Vec::Constant(m, half_width);
    c.components = [m](const Vec&) { return Mat::Identity(m, m); };
    c.regularity_scale = 1.0;
    c.name = "euclidean";
    return c;
}

inline ChartMetric constant_metric_chart(const Mat& g, double half_width = 10.0) {
    ChartMetric c;
    c.dim = static_cast<int>(g.rows());
    c.lo = Vec::Constant(c.dim, -half_width);
    c.hi = Vec::Constant(c.dim, half_width);
    c.components = [g](const Vec&) { return g; };
    c.regularity_scale = 1.0;
    c.name = "constant";
    return c;
}

// Unit round S^m in nested polar coordinates (phi_1..phi_m):
//   g = dphi_1^2 + sin^2(phi_1) dphi_2^2 + sin^2(phi_1) sin^2(phi_2) dphi_3^2 + ...
inline ChartMetric sphere_chart(int m) {
    ChartMetric c;
    c.dim = m;
    c.lo = Vec::Constant(m, 0.15);
    c.hi = Vec::Constant(m, M_PI - 0.15);
    c.components = [m](const Vec& p) {
        Mat g = Mat::Zero(m, m);
        double pref = 1.0;
        for (int i = 0; i < m; ++i) {
            g(i, i) = pref;
            double s = std::sin(p[i]);
            pref *= s * s;
        }
        return g;
    };
    c.regularity_scale = 1.0;
    c.name = "sphere";
    return c;
}

// Hyperbolic space in normal coordinates: dr^2 + sinh^2(r) g_{S^{m-1}},
// coordinates (r, phi_1..phi_{m-1}).
inline ChartMetric hyperbolic_chart(int m, double r_lo = 0.2, double r_hi = 12.0) {
    ChartMetric c;
    c.dim = m;
    c.lo = Vec::Constant(m, 0.15);
    c.hi = Vec::Constant(m, M_PI - 0.15);
    c.lo[0] = r_lo;
    c.hi[0] = r_hi;
    c.components = [m](const Vec& p) {
        Mat g = Mat::Zero(m, m);
        double sh = std::sinh(p[0]);
        g(0, 0) = 1.0;
        double pref = sh * sh;
        for (int i = 1; i < m; ++i) {
            g(i, i) = pref;
            double s = std::sin(p[i]);
            pref *= s * s;
        }
        return g;
    };
    c.regularity_scale = 1.0;
    c.name = "hyperbolic";
    return c;
}

}  // namespace calabiglue
