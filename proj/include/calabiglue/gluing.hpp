// SPDX-License-Identifier: MIT
#pragma once

#include "calabiglue/obstruction.hpp"

namespace calabiglue {

// ---- cutoff, weight, rho ------------------------------------------------------

// Smooth decreasing cutoff: 1 for s <= 1/2, 0 for s >= 2, quintic smoothstep
// in between.
inline double cutoff_chi(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 2.0) return 0.0;
    double tau = (s - 0.5) / 1.5;
    double sm = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
    return 1.0 - sm;
}

// chi_t(r) = chi(t^{1/4} r); equals 1 for r <= (1/2) t^{-1/4}, 0 for r >= 2 t^{-1/4}.
inline double cutoff_chi_t(double r, double t) {
    if (!(t > 0)) throw bad_argument("cutoff_chi_t: t > 0 required");
    return cutoff_chi(std::pow(t, 0.25) * r);
}

// rho(r): 1 for r <= 1, r for r >= 2, smooth monotone interpolation between.
inline double rho_function(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return r;
    double tau = r - 1.0;
    double sm = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
    return 1.0 + tau * sm;
}

// Weight location: inner side uses the ALE coordinate r, outer side the
// orbifold coordinate |z| (= r sqrt(t) across the attaching map).
struct WeightLocation {
    enum class Side { Inner, Outer };
    Side side = Side::Inner;
    double coord = 1.0;  // r (inner) or |z| (outer)
};

// Piecewise weight: t^{1/2} on the deep inner region, r t^{1/2} going out,
// |z| on the orbifold side, 1 beyond the injectivity radius.
inline double weight_w(const WeightLocation& loc, double t, double inj_radius = 1.0) {
    if (!(t > 0)) throw bad_argument("weight_w: t > 0 required");
    double st = std::sqrt(t);
    if (loc.side == WeightLocation::Side::Inner) return st * std::max(1.0, loc.coord);
    double z = loc.coord;
    if (z >= inj_radius) return 1.0;
    if (z <= 0.5 * inj_radius) return z;
    // monotone band from inj/2 up to 1 at the injectivity radius
    double tau = (z - 0.5 * inj_radius) / (0.5 * inj_radius);
    return 0.5 * inj_radius + tau * (1.0 - 0.5 * inj_radius);
}

// ---- glue configuration ---------------------------------------------------------

struct GlueConfig {
    CalabiParams params;
    double t = 1e-3;
    CurvatureData data;      // orbifold curvature at the singular point
    QuadraticTensor H;       // Bianchi-gauged quadratic jet of the orbifold metric
    double lambda_orb = 0;   // Einstein constant of the orbifold
    double lambda_obs = 0;   // normalized obstruction -lambda_closed / |o|^2
    bool flat_model = false;

    static GlueConfig make(const CurvatureData& d, double t) {
        d.validate();
        GlueConfig g;
        g.params = CalabiParams(d.n);
        g.t = t;
        g.data = d;
        g.H = gauge_tensor_H(d);
        g.lambda_orb = d.lambda;
        g.lambda_obs = -obstruction_lambda_closed(d) / o_norm_l2_squared(d.n);
        g.flat_model = d.riem.max_abs() < 1e-14 && std::abs(d.lambda) < 1e-14;
        return g;
    }
};

// ---- refined approximate metric ---------------------------------------------------

// g_t = (1 - chi_t(r)) * (t g_euc + t^2 H) + chi_t(r) * (t g_cal + t^2 H)
//     = t [ (1-chi) g_euc + chi g_cal ] + t^2 H(x)
// on the neck annulus; equals t(g_cal + tH) where chi = 1 and the pulled-back
// quadratic orbifold jet t(g_euc + tH) where chi = 0.
inline Mat refined_neck_components(const GlueConfig& cfg, const Vec& x) {
    double r = x.norm();
    double chi = cutoff_chi_t(r, cfg.t);
    const int m = cfg.params.real_dim();
    Mat g = (1.0 - chi) * Mat::Identity(m, m);
    if (chi != 0.0) g += chi * calabi_real_components(x, cfg.params);
    return cfg.t * g + cfg.t * cfg.t * cfg.H.contract(x);
}

struct PositivityFailure {
    bool failed = false;
    Vec point;
    double min_eigenvalue = 0;
};

// Chart on the positive-orthant box reaching across the damage zone
// (1/2) t^{-1/4} < r < 2 t^{-1/4}; the box edge is kept at 2.5 t^{-1/4} per
// coordinate so even the corners stay inside the region where t^2 H cannot
// overwhelm t g. Throws if t is too large for positive definiteness, naming
// the offending point.
inline ChartMetric refined_neck_metric(const GlueConfig& cfg, bool scan_positivity = true) {
    const int m = cfg.params.real_dim();
    double s = std::pow(cfg.t, -0.25);
    ChartMetric c;
    c.dim = m;
    c.lo = Vec::Constant(m, 0.02 * s);
    c.hi = Vec::Constant(m, 2.5 * s);
    c.components = [cfg](const Vec& x) { return refined_neck_components(cfg, x); };
    c.regularity_scale = 1.0;
    c.name = "refined-neck-n" + std::to_string(cfg.params.n);

    if (scan_positivity) {
        Rng rng(11);
        for (int i = 0; i <= 24; ++i) {
            Vec x;
            if (i == 24) {
                x = c.hi;  // box corner, the largest radius in the domain
            } else {
                Vec dir = rng.sphere_point(m);
                for (int a = 0; a < m; ++a) dir[a] = std::abs(dir[a]) + 0.2;
                dir /= dir.norm();
                double fr = 0.3 + 2.1 * (i / 23.0);
                x = (fr * s) * dir;
            }
            Mat g = c.components(x);
            Eigen::SelfAdjointEigenSolver<Mat> es(g);
            if (es.eigenvalues().minCoeff() <= 0.0) {
                std::string msg = "refined_neck_metric: t too large, metric not positive at (";
                for (int a = 0; a < m; ++a)
                    msg += std::to_string(x[a]) + (a + 1 < m ? "," : ")");
                throw bad_argument(msg);
            }
        }
    }
    return c;
}

// ---- Einstein residual --------------------------------------------------------------

// | Ric(g_t) - Lambda g_t - t lambda chi_t(rho) o |_{g_cal} at a point.
// `drop_counterterm` removes the t lambda chi_t(rho) o term (negative control).
inline double einstein_residual(const GlueConfig& cfg, const ChartMetric& chart, const Vec& x,
                                double step, int fd_order = 4, bool drop_counterterm = false) {
    CurvatureBundle cb = curvature(chart, x, step, fd_order);
    double r = x.norm();
    Mat resid = cb.ricci - cfg.lambda_orb * cb.g;
    if (!drop_counterterm) {
        double chi = cutoff_chi_t(rho_function(r), cfg.t);
        resid -= cfg.t * cfg.lambda_obs * chi * o_components(x, cfg.params);
    }
    // norm with respect to the unscaled Calabi metric
    Mat gc = calabi_real_components(x, cfg.params);
    Mat gInv = gc.inverse();
    Mat up = gInv * resid * gInv;
    double s = (up.array() * resid.array()).sum();
    return std::sqrt(std::max(0.0, s));
}

inline double einstein_residual(const GlueConfig& cfg, const Vec& x, double step = 0.0) {
    ChartMetric chart = refined_neck_metric(cfg, false);
    if (step <= 0) step = 0.02;
    return einstein_residual(cfg, chart, x, step);
}

// Numerical check that Ric is invariant under constant metric scaling; run
// before trusting residual magnitudes.
inline double ricci_scale_invariance_residual(const ChartMetric& chart, const Vec& p, double factor,
                                              double step, int fd_order = 4) {
    CurvatureBundle a = curvature(chart, p, step, fd_order);
    ChartMetric scaled = chart;
    auto base = chart.components;
    scaled.components = [base, factor](const Vec& q) { return Mat(factor * base(q)); };
    CurvatureBundle b = curvature(scaled, p, step, fd_order);
    double scale = std::max(a.ricci.cwiseAbs().maxCoeff(), 1e-30);
    return (a.ricci - b.ricci).cwiseAbs().maxCoeff() / scale;
}

// ---- residual sweep -----------------------------------------------------------------

struct SweepRow {
    double t = 0;
    double sup_residual = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double slope = 0;
    double intercept = 0;
    double predicted_slope = 1.5;  // residual ~ t^2 rho^2 at rho = c t^{-1/4}
    bool degenerate_flat = false;
    bool pass = false;
    double slope_tol = 0.25;
};

// Sup of the Einstein residual over damage-zone sample points at fixed
// relative positions rho * t^{1/4}, swept over t; fits the log-log rate.
inline SweepResult residual_sweep(const CurvatureData& d, const std::vector<double>& ts,
                                  const std::vector<double>& rel_positions = {0.9, 1.2, 1.5},
                                  int directions = 3, double step = 0.02, uint64_t seed = 5) {
    if (ts.size() < 5) throw bad_argument("residual_sweep: need >= 5 values of t");
    {
        double lo = *std::min_element(ts.begin(), ts.end());
        double hi = *std::max_element(ts.begin(), ts.end());
        if (std::log10(hi / lo) < 1.5 - 1e-9)
            throw bad_argument("residual_sweep: t range must span >= 1.5 decades");
    }
    const int m = 2 * d.n;
    Rng rng(seed);
    std::vector<Vec> dirs;
    for (int i = 0; i < directions; ++i) {
        Vec v = rng.sphere_point(m);
        for (int a = 0; a < m; ++a) v[a] = std::abs(v[a]) + 0.25;
        dirs.push_back(v / v.norm());
    }

    SweepResult out;
    bool flat = false;
    for (double t : ts) {
        GlueConfig cfg = GlueConfig::make(d, t);
        flat = cfg.flat_model;
        ChartMetric chart = refined_neck_metric(cfg, false);
        double s = std::pow(t, -0.25);
        double sup = 0;
        for (double rel : rel_positions)
            for (const Vec& dir : dirs)
                sup = std::max(sup, einstein_residual(cfg, chart, (rel * s) * dir, step));
        out.rows.push_back({t, sup});
    }

    if (flat) {
        // no Einstein-residual content: only the cutoff interpolation of two
        // Ricci-flat metrics remains, decaying at the ALE rate
        out.degenerate_flat = true;
        out.pass = true;
        for (auto& r : out.rows) out.pass = out.pass && r.sup_residual < 1e-4;
        return out;
    }
    std::vector<double> xs, ys;
    for (auto& r : out.rows) {
        xs.push_back(r.t);
        ys.push_back(r.sup_residual);
    }
    LogLogFit fit = loglog_fit(xs, ys, 1e-11);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.pass = std::abs(out.slope - out.predicted_slope) <= out.slope_tol;
    return out;
}

}  // namespace calabiglue
