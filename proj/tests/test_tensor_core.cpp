// SPDX-License-Identifier: MIT
#include "calabiglue/tensor_core.hpp"

#include <gtest/gtest.h>

using namespace calabiglue;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

// Closed-form Christoffel symbols of the unit round S^2 in polar coordinates
// (phi, lambda): Gamma^phi_{ll} = -sin(phi)cos(phi), Gamma^l_{pl} = cot(phi).
Tensor3 sphere2_christoffel_exact(double phi) {
    Tensor3 g(2);
    g(0, 1, 1) = -std::sin(phi) * std::cos(phi);
    g(1, 0, 1) = std::cos(phi) / std::sin(phi);
    g(1, 1, 0) = g(1, 0, 1);
    return g;
}

}  // namespace

TEST(Christoffel, EuclideanAllZero) {
    ChartMetric c = euclidean_chart(4);
    Vec p = Vec::Constant(4, 0.37);
    Tensor3 g = christoffel(c, p, c.default_step());
    EXPECT_LT(g.max_abs(), 1e-12);
}

TEST(Christoffel, RoundSphereMatchesClosedForm) {
    ChartMetric c = sphere_chart(2);
    for (double phi : {M_PI / 3.0, M_PI / 2.0}) {  // generic point and equator
        Vec p = vec2(phi, 1.1);
        Tensor3 num = christoffel(c, p, 1e-4);
        Tensor3 exact = sphere2_christoffel_exact(phi);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    EXPECT_NEAR(num(k, i, j), exact(k, i, j), 1e-6)
                        << "Gamma^" << k << "_" << i << j << " at phi=" << phi;
    }
}

TEST(Christoffel, HyperbolicRadialMixedSymbolIsCoth) {
    for (int m : {3, 4, 6}) {
        ChartMetric c = hyperbolic_chart(m);
        Vec p = Vec::Constant(m, 1.2);
        p[0] = 1.7;
        Tensor3 g = christoffel(c, p, 1e-4);
        EXPECT_NEAR(g(1, 0, 1), std::cosh(1.7) / std::sinh(1.7), 1e-6) << "m=" << m;
    }
}

TEST(Christoffel, SymmetricInLowerIndices) {
    ChartMetric c = hyperbolic_chart(4);
    Vec p = Vec::Constant(4, 1.0);
    p[0] = 2.1;
    Tensor3 g = christoffel(c, p, 1e-4);
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(g(k, i, j), g(k, j, i));
}

TEST(Christoffel, OutsideDomainThrows) {
    ChartMetric c = sphere_chart(2);
    EXPECT_THROW(christoffel(c, vec2(0.0, 1.0), 1e-4), point_outside_domain);
}

TEST(Christoffel, SingularMetricThrows) {
    ChartMetric c = euclidean_chart(2);
    c.components = [](const Vec&) {
        Mat g = Mat::Zero(2, 2);
        g(0, 0) = 1.0;
        return g;
    };
    EXPECT_THROW(christoffel(c, vec2(0.1, 0.1), 1e-4), singular_metric);
}

TEST(Curvature, EuclideanIsExactlyFlat) {
    ChartMetric c = euclidean_chart(4);
    CurvatureBundle cb = curvature(c, Vec::Constant(4, -0.2), c.default_step());
    EXPECT_LT(cb.riemann.max_abs(), 1e-11);
    EXPECT_LT(std::abs(cb.scalar), 1e-11);
}

// Calibration: unit round S^m has scalar curvature m(m-1) and Ric = (m-1) g.
TEST(Curvature, UnitSphereScalarCalibration) {
    for (int m : {2, 3, 4}) {
        ChartMetric c = sphere_chart(m);
        Vec p = Vec::Constant(m, 1.0);
        p[0] = 1.3;
        CurvatureBundle cb = curvature(c, p, 2e-4);
        EXPECT_NEAR(cb.scalar, m * (m - 1.0), 1e-4) << "m=" << m;
        Mat diff = cb.ricci - (m - 1.0) * cb.g;
        EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-5) << "m=" << m;
    }
}

TEST(Curvature, UnitSphereS4Scalar12) {
    ChartMetric c = sphere_chart(4);
    Vec p(4);
    p << 1.2, 0.9, 1.4, 0.8;
    CurvatureBundle cb = curvature(c, p, 2e-4);
    EXPECT_NEAR(cb.scalar, 12.0, 1e-4);
}

TEST(Curvature, HyperbolicConstantCurvatureMinusOne) {
    for (int m : {4, 6}) {
        ChartMetric c = hyperbolic_chart(m);
        Vec p = Vec::Constant(m, 1.1);
        p[0] = 1.9;
        CurvatureBundle cb = curvature(c, p, 2e-4);
        EXPECT_NEAR(cb.scalar, -m * (m - 1.0), 2e-4 * m * m) << "m=" << m;
        // R_{ijkl} = -(g_ik g_jl - g_il g_jk)
        double scale = cb.riemann.max_abs();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) {
                        double want =
                            -(cb.g(i, k) * cb.g(j, l) - cb.g(i, l) * cb.g(j, k));
                        EXPECT_NEAR(cb.riemann(i, j, k, l), want, 1e-5 * scale);
                    }
    }
}

TEST(Curvature, BundleInvariantsOnRandomPoints) {
    std::vector<ChartMetric> charts = {euclidean_chart(4), sphere_chart(3), sphere_chart(4),
                                       hyperbolic_chart(4), hyperbolic_chart(6)};
    Rng rng(42);
    int checked = 0;
    for (const auto& c : charts) {
        for (int trial = 0; trial < 20; ++trial) {
            Vec p(c.dim);
            for (int i = 0; i < c.dim; ++i) {
                double margin = 0.1 * (c.hi[i] - c.lo[i]);
                p[i] = c.lo[i] + margin + (c.hi[i] - c.lo[i] - 2 * margin) * rng.uniform();
            }
            CurvatureBundle cb = curvature(c, p, 1e-3, 4);
            double scale = std::max(cb.riemann.max_abs(), 1e-9);
            EXPECT_LT(cb.symmetry_residual(), 1e-6 * scale) << c.name;
            EXPECT_LT(cb.first_bianchi_residual(), 1e-6 * scale) << c.name;
            EXPECT_LT(cb.ricci_contraction_residual(), 1e-6 * scale) << c.name;
            ++checked;
        }
    }
    EXPECT_EQ(checked, 100);
}

// Second-order stencil: halving the step cuts the curvature error ~4x.
TEST(Curvature, StepHalvingReducesErrorFourfold) {
    ChartMetric c = sphere_chart(3);
    Vec p = Vec::Constant(3, 1.0);
    p[0] = 1.2;
    double h = 4e-3;
    double e1 = std::abs(curvature(c, p, h, 2).scalar - 6.0);
    double e2 = std::abs(curvature(c, p, h / 2, 2).scalar - 6.0);
    EXPECT_GT(e1 / e2, 2.8);
    EXPECT_LT(e1 / e2, 5.5);
}

TEST(Curvature, RingROfMetricIsRicci) {
    ChartMetric c = hyperbolic_chart(4);
    Vec p = Vec::Constant(4, 1.0);
    p[0] = 1.5;
    CurvatureBundle cb = curvature(c, p, 2e-4);
    Mat rr = ring_R(cb, cb.g);
    EXPECT_LT((rr - cb.ricci).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(CovariantDerivative, ConstantScalarIsZero) {
    ChartMetric c = hyperbolic_chart(4);
    TensorField f = scalar_field([](const Vec&) { return 3.5; });
    Vec p = Vec::Constant(4, 1.3);
    NTensor df = covariant_derivative(f, c, p, 1e-4);
    EXPECT_LT(df.max_abs(), 1e-12);
}

TEST(CovariantDerivative, CoordinateOneFormOnEuclideanIsZero) {
    ChartMetric c = euclidean_chart(3);
    TensorField w;
    w.rank = 1;
    w.comp = [](const Vec& p) {
        NTensor t(static_cast<int>(p.size()), 1);
        t(0) = 1.0;  // dx^1
        return t;
    };
    NTensor dw = covariant_derivative(w, c, Vec::Constant(3, 0.4), 1e-4);
    EXPECT_LT(dw.max_abs(), 1e-12);
}

TEST(CovariantDerivative, ReducesToPartialsWhenFlat) {
    ChartMetric c = euclidean_chart(2);
    TensorField w;
    w.rank = 1;
    w.comp = [](const Vec& p) {
        NTensor t(2, 1);
        t(0) = p[0] * p[0];
        t(1) = p[0] * p[1];
        return t;
    };
    Vec p = vec2(0.7, -0.3);
    NTensor dw = covariant_derivative(w, c, p, 1e-5);
    EXPECT_NEAR(dw(0, 0), 2 * p[0], 1e-9);
    EXPECT_NEAR(dw(0, 1), p[1], 1e-9);
    EXPECT_NEAR(dw(1, 1), p[0], 1e-9);
    EXPECT_NEAR(dw(1, 0), 0.0, 1e-9);
}

// Metric compatibility: nabla g = 0 on a curved chart.
TEST(CovariantDerivative, MetricIsParallel) {
    ChartMetric c = sphere_chart(3);
    Vec p = Vec::Constant(3, 1.1);
    NTensor dg = covariant_derivative(metric_field(c), c, p, 1e-4);
    EXPECT_LT(dg.max_abs(), 1e-7);
}

TEST(Inner, MetricWithItselfGivesDimension) {
    ChartMetric c = hyperbolic_chart(6);
    Vec p = Vec::Constant(6, 1.0);
    p[0] = 1.4;
    double v = inner(c, p, metric_field(c), metric_field(c));
    EXPECT_NEAR(v, 6.0, 1e-12);

    ChartMetric e = euclidean_chart(6);
    EXPECT_NEAR(inner(e, Vec::Constant(6, 0.5), metric_field(e), metric_field(e)), 6.0, 1e-14);
}

TEST(Inner, ValenceMismatchThrows) {
    ChartMetric c = euclidean_chart(3);
    TensorField w;
    w.rank = 1;
    w.comp = [](const Vec&) { return NTensor(3, 1); };
    EXPECT_THROW(inner(c, Vec::Constant(3, 0.1), metric_field(c), w), valence_mismatch);
}

TEST(Inner, BilinearAndSymmetric) {
    ChartMetric c = hyperbolic_chart(4);
    Vec p = Vec::Constant(4, 1.2);
    Rng rng(3);
    NTensor a(4, 2), b(4, 2);
    for (auto& x : a.v) x = rng.normal();
    for (auto& x : b.v) x = rng.normal();
    double ab = inner(c, p, a, b);
    double ba = inner(c, p, b, a);
    EXPECT_NEAR(ab, ba, 1e-12 * std::abs(ab));
    NTensor a2 = a;
    a2 *= 2.5;
    EXPECT_NEAR(inner(c, p, a2, b), 2.5 * ab, 1e-12 * std::abs(ab) * 2.5);
}
