// SPDX-License-Identifier: MIT
#pragma once

#include "calabiglue/deform_ops.hpp"

#include <map>
#include <mutex>
#include <thread>

namespace calabiglue {

// ---- quadratic tensors -----------------------------------------------------

// Coefficients of T_{ijkl} x^i x^j dx^k (.) dx^l, symmetric in (i,j) and (k,l).
struct QuadraticTensor {
    int m = 0;
    Tensor4 c;

    QuadraticTensor() = default;
    explicit QuadraticTensor(int m_) : m(m_), c(m_) {}

    // Symmetrize raw coefficients over (i,j) and (k,l).
    static QuadraticTensor symmetrized(const Tensor4& raw) {
        QuadraticTensor t(raw.n);
        const int m = raw.n;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l)
                        t.c(i, j, k, l) = 0.25 * (raw(i, j, k, l) + raw(j, i, k, l) +
                                                  raw(i, j, l, k) + raw(j, i, l, k));
        return t;
    }

    double symmetry_residual() const {
        double r = 0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) {
                        r = std::max(r, std::abs(c(i, j, k, l) - c(j, i, k, l)));
                        r = std::max(r, std::abs(c(i, j, k, l) - c(i, j, l, k)));
                    }
        return r;
    }

    // H(x)_{kl} = T_{ijkl} x^i x^j.  The (k,l) block is symmetric, so the flat
    // accumulation below is storage-order agnostic.
    void contract_into(const Vec& x, Mat& out) const {
        out.setZero();
        const size_t mm = static_cast<size_t>(m) * m;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double w = x[i] * x[j];
                if (w == 0.0) continue;
                const double* blk = c.v.data() + (static_cast<size_t>(i) * m + j) * mm;
                double* o = out.data();
                for (size_t t = 0; t < mm; ++t) o[t] += w * blk[t];
            }
    }

    Mat contract(const Vec& x) const {
        Mat out(m, m);
        contract_into(x, out);
        return out;
    }

    TensorField field() const {
        TensorField t;
        t.rank = 2;
        t.kind = FieldKind::Symmetric;
        t.comp = [*this](const Vec& x) { return from_matrix(contract(x)); };
        return t;
    }

    QuadraticTensor& operator+=(const QuadraticTensor& o) {
        for (size_t i = 0; i < c.v.size(); ++i) c.v[i] += o.c.v[i];
        return *this;
    }
    QuadraticTensor& operator*=(double s) {
        for (double& x : c.v) x *= s;
        return *this;
    }
};

inline QuadraticTensor operator*(double s, QuadraticTensor t) { return t *= s; }
inline QuadraticTensor operator+(QuadraticTensor a, const QuadraticTensor& b) { return a += b; }

// Full coefficient contraction sum_{ijkl} A_{ijkl} B_{ijkl}.
inline double inner4(const QuadraticTensor& a, const QuadraticTensor& b) {
    if (a.m != b.m) throw valence_mismatch("inner4: dimension mismatch");
    double s = 0;
    for (size_t i = 0; i < a.c.v.size(); ++i) s += a.c.v[i] * b.c.v[i];
    return s;
}

// B_euc of the quadratic field: coefficients L_{jl} of (-2 T_{kjkl} + T_{jlkk}) x^j dx^l.
inline Mat bianchi_euc_quadratic(const QuadraticTensor& t) {
    const int m = t.m;
    Mat L = Mat::Zero(m, m);
    for (int j = 0; j < m; ++j)
        for (int l = 0; l < m; ++l) {
            double s = 0;
            for (int k = 0; k < m; ++k) s += -2.0 * t.c(k, j, k, l) + t.c(j, l, k, k);
            L(j, l) = s;
        }
    return L;
}

// ---- pointwise orbifold curvature data ------------------------------------------

// Algebraic curvature data at the singular point: dimension, Einstein constant,
// Riemann components (stored so that constant curvature c reads
// R_{ijkl} = c (g_ik g_jl - g_il g_jk)), and the complex structure J.
struct CurvatureData {
    int n = 0;  // complex dimension
    int m = 0;  // real dimension 2n
    double lambda = 0;
    Tensor4 riem;
    Mat J;

    double scale() const { return riem.max_abs() + std::abs(lambda) + 1e-30; }

    // Throws ingestion_error naming the first violated identity.
    void validate(double tol_rel = 1e-10) const {
        if (n < 2) throw ingestion_error("curvature data: n must be >= 2");
        if (m != 2 * n) throw ingestion_error("curvature data: m must equal 2n");
        const double tol = tol_rel * scale();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) {
                        double x = riem(i, j, k, l);
                        if (std::abs(x + riem(j, i, k, l)) > tol)
                            throw ingestion_error("curvature data: antisymmetry in (i,j) violated");
                        if (std::abs(x + riem(i, j, l, k)) > tol)
                            throw ingestion_error("curvature data: antisymmetry in (k,l) violated");
                        if (std::abs(x - riem(k, l, i, j)) > tol)
                            throw ingestion_error("curvature data: pair symmetry violated");
                        if (std::abs(x + riem(j, k, i, l) + riem(k, i, j, l)) > tol)
                            throw ingestion_error("curvature data: first Bianchi identity violated");
                    }
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) {
                double ric = 0;
                for (int j = 0; j < m; ++j) ric += riem(i, j, k, j);
                double want = (i == k) ? lambda : 0.0;
                if (std::abs(ric - want) > tol)
                    throw ingestion_error("curvature data: Einstein condition Ric = lambda g violated");
            }
        Mat JJ = J * J + Mat::Identity(m, m);
        if (JJ.cwiseAbs().maxCoeff() > 1e-10)
            throw ingestion_error("curvature data: J^2 = -I violated");
        Mat orth = J.transpose() * J - Mat::Identity(m, m);
        if (orth.cwiseAbs().maxCoeff() > 1e-10)
            throw ingestion_error("curvature data: J not orthogonal");
    }

    Mat ricci() const {
        Mat r = Mat::Zero(m, m);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) {
                double s = 0;
                for (int j = 0; j < m; ++j) s += riem(i, j, k, j);
                r(i, k) = s;
            }
        return r;
    }

    double scalar() const { return ricci().trace(); }

    // <R(w), w> = R_{ijkl} J^i_j J^k_l  (quadratic in the Kaehler form, so
    // independent of the orientation of J).
    double r_omega_omega() const {
        double s = 0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (J(i, j) == 0.0) continue;
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) s += riem(i, j, k, l) * J(i, j) * J(k, l);
            }
        return s;
    }
};

// ---- builders --------------------------------------------------------------------

inline CurvatureData flat_data(int n) {
    CurvatureData d;
    d.n = n;
    d.m = 2 * n;
    d.lambda = 0;
    d.riem = Tensor4(d.m);
    d.J = standard_J(d.m);
    return d;
}

// Constant sectional curvature c: R_{ijkl} = c (d_ik d_jl - d_il d_jk), lambda = (m-1)c.
inline CurvatureData constant_curvature_data(double c, int n) {
    CurvatureData d = flat_data(n);
    d.lambda = (d.m - 1) * c;
    for (int i = 0; i < d.m; ++i)
        for (int j = 0; j < d.m; ++j) {
            d.riem(i, j, i, j) += c;
            d.riem(i, j, j, i) -= c;
        }
    return d;
}

// Complex space form with constant holomorphic sectional curvature mu:
//   R_{ijkl} = mu/4 (d_ik d_jl - d_il d_jk + J_ik J_jl - J_il J_jk + 2 J_ij J_kl).
// Satisfies <R(w),w> = 2 R exactly; used as the Kaehler-Einstein model with
// prescribed scalar curvature.
inline CurvatureData kahler_einstein_data(double scalar_R, int n) {
    CurvatureData d = flat_data(n);
    double mu = scalar_R / (n * (n + 1.0));
    d.lambda = mu * (n + 1.0) / 2.0;
    const Mat& J = d.J;
    for (int i = 0; i < d.m; ++i)
        for (int j = 0; j < d.m; ++j)
            for (int k = 0; k < d.m; ++k)
                for (int l = 0; l < d.m; ++l) {
                    double v = ((i == k && j == l) ? 1.0 : 0.0) - ((i == l && j == k) ? 1.0 : 0.0);
                    v += J(i, k) * J(j, l) - J(i, l) * J(j, k) + 2.0 * J(i, j) * J(k, l);
                    d.riem(i, j, k, l) = 0.25 * mu * v;
                }
    return d;
}

// Random Einstein-admissible data: symmetrize a random array to the full
// Riemann symmetries, project out the first-Bianchi failure (its totally
// antisymmetric part), then fix the Ricci part with a Kulkarni-Nomizu
// correction so that Ric = lambda g exactly.
inline CurvatureData random_einstein_data(int n, double lambda, uint64_t seed) {
    CurvatureData d = flat_data(n);
    d.lambda = lambda;
    const int m = d.m;
    Rng rng(seed);

    Tensor4 raw(m);
    for (double& x : raw.v) x = rng.normal();

    Tensor4 sym(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    double a = 0.25 * (raw(i, j, k, l) - raw(j, i, k, l) - raw(i, j, l, k) +
                                       raw(j, i, l, k));
                    double b = 0.25 * (raw(k, l, i, j) - raw(l, k, i, j) - raw(k, l, j, i) +
                                       raw(l, k, j, i));
                    sym(i, j, k, l) = 0.5 * (a + b);
                }

    // first Bianchi projection: subtract the cyclic (totally antisymmetric) part
    Tensor4 proj(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    double b =
                        (sym(i, j, k, l) + sym(j, k, i, l) + sym(k, i, j, l)) / 3.0;
                    proj(i, j, k, l) = sym(i, j, k, l) - b;
                }

    // Kulkarni-Nomizu correction (S o g) to enforce Ric = lambda I:
    //   Ric(S o g) = (m-2) S + tr(S) I
    Mat E = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
            double s = 0;
            for (int j = 0; j < m; ++j) s += proj(i, j, k, j);
            E(i, k) = s;
        }
    Mat target = lambda * Mat::Identity(m, m) - E;
    double trS = target.trace() / (2.0 * m - 2.0);
    Mat S = (target - trS * Mat::Identity(m, m)) / (m - 2.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    double kn = S(i, k) * (j == l ? 1.0 : 0.0) - S(i, l) * (j == k ? 1.0 : 0.0) +
                                (i == k ? 1.0 : 0.0) * S(j, l) - (i == l ? 1.0 : 0.0) * S(j, k);
                    proj(i, j, k, l) += kn;
                }
    d.riem = proj;
    return d;
}

// ---- sphere moments ----------------------------------------------------------------

// int_{S^{m-1}} x^i x^j dS = (w_{m-1}/m) d_ij; returns the coefficient.
inline double sphere_moment2(int m) {
    if (m < 2 || m % 2 != 0) throw bad_argument("sphere_moment2: even dimension m = 2n required");
    return sphere_volume(m - 1) / m;
}

// int_{S^{m-1}} x^i x^j x^k x^l dS = w_{m-1}/(m(m+2)) (d_kl d_ij + d_ki d_lj + d_kj d_il).
inline double sphere_moment4(int m, int i, int j, int k, int l) {
    if (m < 2 || m % 2 != 0) throw bad_argument("sphere_moment4: even dimension m = 2n required");
    auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    return sphere_volume(m - 1) / (m * (m + 2.0)) *
           (d(k, l) * d(i, j) + d(k, i) * d(l, j) + d(k, j) * d(i, l));
}

// ---- gauge tensor -------------------------------------------------------------------

// Raw coefficient of the Bianchi-gauged quadratic jet:
//   H_{ijkl} = -1/3 R_{ikjl} - lambda/(3(n+1)) (d_ij d_kl + 2 d_ik d_jl)
// with (i,j) the quadratic and (k,l) the form indices.
inline double gauge_raw_coeff(const CurvatureData& d, int i, int j, int k, int l) {
    double v = -d.riem(i, k, j, l) / 3.0;
    double del = ((i == j && k == l) ? 1.0 : 0.0) + 2.0 * ((i == k && j == l) ? 1.0 : 0.0);
    v -= d.lambda / (3.0 * (d.n + 1.0)) * del;
    return v;
}

inline QuadraticTensor gauge_tensor_H(const CurvatureData& d) {
    d.validate();
    Tensor4 raw(d.m);
    for (int i = 0; i < d.m; ++i)
        for (int j = 0; j < d.m; ++j)
            for (int k = 0; k < d.m; ++k)
                for (int l = 0; l < d.m; ++l) raw(i, j, k, l) = gauge_raw_coeff(d, i, j, k, l);
    return QuadraticTensor::symmetrized(raw);
}

// ---- contraction ledger --------------------------------------------------------------

// The six scalars entering the surface-integral assembly, contracted from the
// raw (unsymmetrized) gauge coefficients.
struct ContractionLedger {
    double h_kkll = 0;      // = -2n lambda
    double h_ikik = 0;      // = -lambda (2n + 8n^2) / (3(n+1))
    double h_ikki = 0;      // =  2n lambda/3 - 2n lambda/(n+1)
    double jj_h_iikl = 0;   // J^p_k J^p_l H_iikl = -2n lambda
    double jj_h_pqkl = 0;   // J^p_k J^q_l H_pqkl = -<Rw,w>/3 - 2n lambda/(3(n+1))
    double jj_h_qpkl = 0;   // J^p_k J^q_l H_qpkl = -<Rw,w>/6 + 2n lambda/(3(n+1))
};

inline ContractionLedger contraction_ledger(const CurvatureData& d) {
    const int m = d.m;
    ContractionLedger L;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            L.h_kkll += gauge_raw_coeff(d, a, a, b, b);
            L.h_ikik += gauge_raw_coeff(d, a, b, a, b);
            L.h_ikki += gauge_raw_coeff(d, a, b, b, a);
        }
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
            double hiikl = 0;
            for (int i = 0; i < m; ++i) hiikl += gauge_raw_coeff(d, i, i, k, l);
            double jj = 0;
            for (int p = 0; p < m; ++p) jj += d.J(p, k) * d.J(p, l);
            L.jj_h_iikl += jj * hiikl;
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q) {
                    double w = d.J(p, k) * d.J(q, l);
                    if (w == 0.0) continue;
                    L.jj_h_pqkl += w * gauge_raw_coeff(d, p, q, k, l);
                    L.jj_h_qpkl += w * gauge_raw_coeff(d, q, p, k, l);
                }
        }
    return L;
}

inline ContractionLedger ledger_closed_forms(const CurvatureData& d) {
    const double n = d.n, lam = d.lambda, rww = d.r_omega_omega();
    ContractionLedger L;
    L.h_kkll = -2.0 * n * lam;
    L.h_ikik = -lam * (2.0 * n + 8.0 * n * n) / (3.0 * (n + 1.0));
    L.h_ikki = 2.0 * n * lam / 3.0 - 2.0 * n * lam / (n + 1.0);
    L.jj_h_iikl = -2.0 * n * lam;
    L.jj_h_pqkl = -rww / 3.0 - 2.0 * n * lam / (3.0 * (n + 1.0));
    L.jj_h_qpkl = -rww / 6.0 + 2.0 * n * lam / (3.0 * (n + 1.0));
    return L;
}

// Residual of J^p_k J^q_l R_{qkpl} = <R(w),w>/2 (cyclic J identity).
inline double bianchi_cyclic_J_residual(const CurvatureData& d) {
    double s = 0;
    for (int p = 0; p < d.m; ++p)
        for (int q = 0; q < d.m; ++q)
            for (int k = 0; k < d.m; ++k)
                for (int l = 0; l < d.m; ++l) s += d.J(p, k) * d.J(q, l) * d.riem(q, k, p, l);
    return std::abs(s - 0.5 * d.r_omega_omega());
}

// Full-sphere integral of (n+1) <H, o_euc> assembled from the six ledger scalars:
//   -w/(2n) (n+1) tm1 + w/4 (tm1 + tm2 + tm3) + w/4 (tm4 + tm5 + tm6).
inline double assemble_surface_integral(const ContractionLedger& L, int n) {
    double w = sphere_volume(2 * n - 1);
    return -w / (2.0 * n) * (n + 1.0) * L.h_kkll +
           w / 4.0 * (L.h_kkll + L.h_ikik + L.h_ikki) +
           w / 4.0 * (L.jj_h_iikl + L.jj_h_pqkl + L.jj_h_qpkl);
}

// ---- obstruction ------------------------------------------------------------------

// (w_{2n-1}/n) ( (2-n)/2 lambda - <R(w),w>/8 ).  This equals the limiting
// surface integral over S_r / Gamma_n of (n+1)/r <H, o>; the normalized
// obstruction is lambda_true = -value / |o|^2_{L2}, reported separately so
// sign conclusions never depend on the positive normalization.
inline double obstruction_bracket(const CurvatureData& d) {
    return (2.0 - d.n) / 2.0 * d.lambda - d.r_omega_omega() / 8.0;
}

inline double obstruction_lambda_closed(const CurvatureData& d) {
    d.validate();
    return sphere_volume(2 * d.n - 1) / d.n * obstruction_bracket(d);
}

// Natural magnitude of the obstruction inputs; quadrature agreement is
// measured against this scale. The bracket can cancel to zero near the wall,
// so the curvature magnitude enters as a floor: the integrand <H, o_euc> has
// size ~ (|Riem| + |lambda|)/3 before the surface integral cancels it down.
inline double obstruction_scale(const CurvatureData& d) {
    double bracket_mag =
        std::abs((2.0 - d.n) / 2.0 * d.lambda) + std::abs(d.r_omega_omega()) / 8.0;
    double data_mag = (d.riem.max_abs() + std::abs(d.lambda)) / 4.0;
    return sphere_volume(2 * d.n - 1) / d.n * (std::max(bracket_mag, data_mag) + 1e-12);
}

struct BruteForceResult {
    double value = 0;
    double std_error = 0;
    uint64_t nodes = 0;
};

// Per-node integrand of the surface integral, averaged exactly over the
// sign-flip group {+-1}^m (a reflection subgroup of O(m) preserving the
// uniform measure, so the average is unbiased). The integrand
//   (n+1) <H(x), o_euc(x)> = (n+1) ( -tr H(x) + n x'H(x)x + n v'H(x)v ),
// v = J^T x, is an even quartic, so only monomials with evenly paired
// indices survive; they collapse to sums of x_a^2 x_b^2 with coefficients
// computed once from H. Never uses the closed-form sphere moments.
struct SignAveragedIntegrand {
    int n = 0, m = 0;
    Vec t1;      // -tr H(x) = sum_a t1_a x_a^2
    Mat M;       // quartic part: sum_{a<=b} M(a,b) x_a^2 x_b^2

    explicit SignAveragedIntegrand(const CurvatureData& d) {
        n = d.n;
        m = d.m;
        QuadraticTensor H = gauge_tensor_H(d);
        t1 = Vec::Zero(m);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) t1[i] -= H.c(i, i, k, k);

        // v_a = s_a x_{p(a)}: p swaps within complex pairs, s alternates.
        std::vector<int> p(m);
        std::vector<double> s(m);
        for (int k = 0; k < m / 2; ++k) {
            p[2 * k] = 2 * k + 1;
            p[2 * k + 1] = 2 * k;
            s[2 * k] = 1.0;
            s[2 * k + 1] = -1.0;
        }
        M = Mat::Zero(m, m);
        std::vector<int> cnt(m);
        auto bucket = [&](int a, int b, int c2, int d2, double coeff) {
            std::fill(cnt.begin(), cnt.end(), 0);
            ++cnt[a];
            ++cnt[b];
            ++cnt[c2];
            ++cnt[d2];
            int lo = -1, hi = -1;
            for (int u = 0; u < m; ++u) {
                if (cnt[u] % 2 != 0) return;  // odd power: averages to zero
                if (cnt[u] == 0) continue;
                if (lo < 0)
                    lo = u;
                else
                    hi = u;
            }
            if (hi < 0) hi = lo;  // x_a^4
            M(std::min(lo, hi), std::max(lo, hi)) += coeff;
        };
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) {
                        double h = H.c(i, j, k, l);
                        if (h == 0.0) continue;
                        bucket(i, j, k, l, n * h);                      // x'H(x)x
                        bucket(i, j, p[k], p[l], n * s[k] * s[l] * h);  // v'H(x)v
                    }
    }

    double operator()(const Vec& x) const {
        double f = 0;
        for (int a = 0; a < m; ++a) {
            double ya = x[a] * x[a];
            f += t1[a] * ya;
            for (int b = a; b < m; ++b) f += M(a, b) * ya * x[b] * x[b];
        }
        return f;
    }
};

// Second averaging layer: the diagonal torus U(1)^n (independent phase on
// each complex line, again measure-preserving isometries). On the sign-averaged
// monomials the fiber average is a quadratic polynomial in the block radii
// u_k = x_{2k}^2 + x_{2k+1}^2:
//   E[x_{2k}^2] = u_k/2, E[x_{2k}^4] = 3 u_k^2/8,
//   E[x_{2k}^2 x_{2k+1}^2] = u_k^2/8, cross blocks factorize.
struct TorusAveragedIntegrand {
    int n = 0;
    Vec tau;   // sum_k tau_k u_k
    Vec Bq;    // sum_k Bq_k u_k^2
    Mat Aq;    // sum_{k<l} Aq(k,l) u_k u_l

    explicit TorusAveragedIntegrand(const CurvatureData& d) {
        SignAveragedIntegrand s(d);
        n = d.n;
        tau = Vec::Zero(n);
        Bq = Vec::Zero(n);
        Aq = Mat::Zero(n, n);
        for (int k = 0; k < n; ++k) {
            tau[k] = 0.5 * (s.t1[2 * k] + s.t1[2 * k + 1]);
            Bq[k] = 0.375 * (s.M(2 * k, 2 * k) + s.M(2 * k + 1, 2 * k + 1)) +
                    0.125 * s.M(2 * k, 2 * k + 1);
            for (int l = k + 1; l < n; ++l)
                Aq(k, l) = 0.25 * (s.M(2 * k, 2 * l) + s.M(2 * k, 2 * l + 1) +
                                   s.M(2 * k + 1, 2 * l) + s.M(2 * k + 1, 2 * l + 1));
        }
    }

    double operator()(const Vec& x) const {
        double f = 0;
        for (int k = 0; k < n; ++k) {
            double uk = x[2 * k] * x[2 * k] + x[2 * k + 1] * x[2 * k + 1];
            f += tau[k] * uk + Bq[k] * uk * uk;
            for (int l = k + 1; l < n; ++l)
                f += Aq(k, l) * uk * (x[2 * l] * x[2 * l] + x[2 * l + 1] * x[2 * l + 1]);
        }
        return f;
    }
};

// Monte Carlo surface integral of (n+1)/r <H, o_euc> over the radius-r0 sphere,
// divided by n for the free quotient action. Exactly radius-independent since
// <H(y), o_euc(y)> scales like r0^{2-2n}.
inline BruteForceResult obstruction_lambda_bruteforce(const CurvatureData& d, double r0,
                                                      uint64_t nodes, uint64_t seed,
                                                      int threads = 0) {
    d.validate();
    if (!(r0 >= 1.0)) throw bad_argument("obstruction_lambda_bruteforce: r0 must be >= 1");
    if (nodes < 1000)
        throw bad_argument("obstruction_lambda_bruteforce: quadrature budget too small (< 1000 nodes)");
    if (threads <= 0) threads = env_thread_count();

    const int m = d.m;
    TorusAveragedIntegrand f_avg(d);

    const uint64_t n_shards = 64;
    uint64_t per_shard = nodes / n_shards;
    uint64_t used = per_shard * n_shards;

    const double radial_factor = (d.n + 1.0) * std::pow(r0, 1.0 - 2.0 * d.n);
    auto run_shard = [&](uint64_t s) {
        Rng rng(shard_seed(seed, s));
        double sum = 0, sum2 = 0;
        Vec x(m);
        for (uint64_t it = 0; it < per_shard; ++it) {
            x = rng.sphere_point(m);
            double f = radial_factor * f_avg(x);
            sum += f;
            sum2 += f * f;
        }
        return std::pair<double, double>(sum, sum2);
    };

    std::vector<std::pair<double, double>> results(n_shards);
    uint64_t next = 0;
    std::mutex mu;
    auto worker = [&]() {
        for (;;) {
            uint64_t s;
            {
                std::lock_guard<std::mutex> lk(mu);
                if (next >= n_shards) return;
                s = next++;
            }
            results[s] = run_shard(s);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(threads, static_cast<int>(n_shards)); ++t)
        pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    double sum = 0, sum2 = 0;
    for (auto& r : results) {
        sum += r.first;
        sum2 += r.second;
    }
    double mean = sum / used;
    double var = std::max(0.0, sum2 / used - mean * mean);
    double area = sphere_volume(m - 1) * std::pow(r0, m - 1);  // full sphere of radius r0

    BruteForceResult out;
    out.value = mean * area / d.n;
    out.std_error = std::sqrt(var / used) * area / d.n;
    out.nodes = used;
    return out;
}

// ---- quadratic tensor ledger: P, Q, A, K, sigma_2 -------------------------------------

// r^2 g_euc, r^2 dr x dr, r^4 theta x theta as quadratic tensors.
struct LedgerTensors {
    QuadraticTensor P, Q, A;
};

inline LedgerTensors ledger_tensors(int m) {
    const Mat J = standard_J(m);
    LedgerTensors t{QuadraticTensor(m), QuadraticTensor(m), QuadraticTensor(m)};
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
                    t.P.c(i, j, k, l) = d(i, j) * d(k, l);
                    t.Q.c(i, j, k, l) = 0.5 * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
                    // J^k_i = J(k,i)
                    t.A.c(i, j, k, l) = 0.5 * (J(k, i) * J(l, j) + J(l, i) * J(k, j));
                }
    return t;
}

// sigma_2 = r^2 ( -dr x dr - (2n-1) r^2 theta x theta + g_euc ).
inline QuadraticTensor sigma2_tensor(int n) {
    LedgerTensors t = ledger_tensors(2 * n);
    QuadraticTensor s = t.P;
    s += -1.0 * t.Q;
    s += -(2.0 * n - 1.0) * t.A;
    return s;
}

// Quadratic coefficients of |z|^{m+2} K_euc( a_{ij} z^i dz^j / |z|^m ):
//   T_{pqij} = abar_ij d_pq - m/4 (d_ip a_qj + d_iq a_pj + d_jp a_qi + d_jq a_pi)
//              - tr(a)/m d_pq d_ij + abar_pq d_ij,
// (p,q) quadratic, (i,j) form indices, abar the symmetric part of a. The m/4
// block carries raw a entries (first index quadratic, second form).
inline QuadraticTensor conformal_killing_quadratic(const Mat& a) {
    const int m = static_cast<int>(a.rows());
    Mat ab = 0.5 * (a + a.transpose());
    double tra = a.trace();
    QuadraticTensor t(m);
    auto d = [](int u, int v) { return u == v ? 1.0 : 0.0; };
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double v = ab(i, j) * d(p, q);
                    v -= m / 4.0 * (d(i, p) * a(q, j) + d(i, q) * a(p, j) + d(j, p) * a(q, i) +
                                    d(j, q) * a(p, i));
                    v -= tra / m * d(p, q) * d(i, j);
                    v += ab(p, q) * d(i, j);
                    t.c(p, q, i, j) = v;
                }
    return t;
}

// ---- wall classifier --------------------------------------------------------------

struct WallVerdict {
    double value = 0;  // n <R(w),w> + 2(n-2) R
    double tol = 0;
    bool obstructed = false;
};

inline WallVerdict classify_wall(const CurvatureData& d) {
    d.validate();
    WallVerdict v;
    double rww = d.r_omega_omega();
    double R = d.scalar();
    v.value = d.n * rww + 2.0 * (d.n - 2.0) * R;
    v.tol = 1e-9 * (std::abs(d.n * rww) + std::abs(2.0 * (d.n - 2.0) * R) + 1e-12);
    v.obstructed = std::abs(v.value) > v.tol;
    return v;
}

// ---- |o|^2_{L2} ---------------------------------------------------------------------

// Radial quadrature of |o|^2 over the Calabi space:
//   |o|^2(r) = (2(n-1)^2 + 2(n-1)) / (1+r^{2n})^2, volume density
//   r^{2n-1} w_{2n-1}/n.  Gauss-Legendre on [0,1] plus inverted tail.
inline double o_norm_l2_squared(int n, int panels = 64) {
    static std::map<int, double> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    auto integrand = [n](double r) {
        double r2n = std::pow(r, 2.0 * n);
        double s = 1.0 + r2n;
        double o2 = (2.0 * (n - 1.0) * (n - 1.0) + 2.0 * (n - 1.0)) / (s * s);
        return o2 * std::pow(r, 2.0 * n - 1.0);
    };
    // composite 4-point Gauss-Legendre
    const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                          0.8611363115940526};
    const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                          0.3478548451374538};
    double I = 0;
    for (int seg = 0; seg < panels; ++seg) {
        double a = static_cast<double>(seg) / panels, b = static_cast<double>(seg + 1) / panels;
        double c0 = 0.5 * (a + b), c1 = 0.5 * (b - a);
        for (int q = 0; q < 4; ++q) {
            double r = c0 + c1 * gx[q];
            I += c1 * gw[q] * integrand(r);                        // r in (0,1)
            double rr = 1.0 / r;                                   // tail r in (1,inf)
            I += c1 * gw[q] * integrand(rr) * rr * rr;
        }
    }
    double val = I * sphere_volume(2 * n - 1) / n;
    std::lock_guard<std::mutex> lk(mu);
    cache[n] = val;
    return val;
}

}  // namespace calabiglue
