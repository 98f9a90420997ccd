// SPDX-License-Identifier: MIT
#include "calabiglue/calabi.hpp"
#include "calabiglue/deform_ops.hpp"

#include <gtest/gtest.h>

#include <complex>

using namespace calabiglue;

namespace {

// Complex-step derivative of F'(u) = (1+u^n)^{1/n}/u; independent oracle for F''.
double fpp_oracle(double u, int n) {
    const double h = 1e-100;
    std::complex<double> uc(u, h);
    std::complex<double> fp = std::pow(1.0 + std::pow(uc, n), 1.0 / n) / uc;
    return fp.imag() / h;
}

// Eguchi-Hanson coefficients (unit scale) in the coordinates used by the
// radial chart, via the substitution rho^4 = 1 + r^4:
//   g = (1-rho^-4)^{-1} drho^2 + rho^2 (1-rho^-4) theta^2 + rho^2 g_FS.
struct EhCoeffs {
    double rr, thth, fs;
};

EhCoeffs eguchi_hanson_oracle(double r) {
    double rho = std::pow(1.0 + std::pow(r, 4), 0.25);
    double f = 1.0 - std::pow(rho, -4);
    double drho_dr = std::pow(r, 3) * std::pow(1.0 + std::pow(r, 4), -0.75);
    return {drho_dr * drho_dr / f, rho * rho * f, rho * rho};
}

Vec ale_point(int m, double r, uint64_t seed) {
    Rng rng(seed);
    Vec v = rng.sphere_point(m);
    for (int i = 0; i < m; ++i) v[i] = std::abs(v[i]) + 0.3;
    return r * v / v.norm();
}

}  // namespace

TEST(Potential, ClosedFormValues) {
    CalabiParams p3(3);
    EXPECT_NEAR(potential_derivs(1.0, p3).fp, std::pow(2.0, 1.0 / 3.0), 1e-14);
    // Euclidean limit
    EXPECT_NEAR(potential_derivs(1e8, p3).fp, 1.0, 1e-7);
    EXPECT_THROW(potential_derivs(0.0, p3), bad_argument);
    EXPECT_THROW(potential_derivs(-1.0, p3), bad_argument);
}

TEST(Potential, SecondDerivativeMatchesComplexStepOracle) {
    for (int n : {2, 3, 4, 5})
        for (double u : {0.5, 1.0, 2.7, 10.0}) {
            CalabiParams p(n);
            double fpp = potential_derivs(u, p).fpp;
            EXPECT_NEAR(fpp, fpp_oracle(u, n), 1e-12 * std::max(1.0, std::abs(fpp)))
                << "n=" << n << " u=" << u;
        }
}

TEST(MongeAmpere, IdentityHoldsEverywhere) {
    EXPECT_LT(monge_ampere_residual(1.0, CalabiParams(3)), 1e-12);
    EXPECT_LT(monge_ampere_residual(10.0, CalabiParams(4)), 1e-12);
    for (int n : {2, 3, 4, 5}) {
        CalabiParams p(n);
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            double u = std::pow(10.0, -3.0 + 6.0 * i / 999.0);
            worst = std::max(worst, monge_ampere_residual(u, p));
        }
        EXPECT_LT(worst, 1e-10) << "n=" << n;
    }
}

TEST(ComplexComponents, MatchesSimplifiedDisplay) {
    // g_{i jbar} = (1+u^n)^{1/n}/u { d_ij - z^j conj(z^i) / (u (1+u^n)) }
    Rng rng(91);
    for (int n : {2, 3, 4, 5}) {
        CalabiParams p(n);
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::VectorXcd z(n);
            for (int i = 0; i < n; ++i) z[i] = std::complex<double>(rng.normal(), rng.normal());
            z *= 0.2 + 3.0 * rng.uniform();
            double u = z.squaredNorm();
            double un = std::pow(u, n);
            Eigen::MatrixXcd g = calabi_complex_components(z, p);
            double pref = std::pow(1.0 + un, 1.0 / n) / u;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    std::complex<double> want =
                        pref * (std::complex<double>(i == j ? 1.0 : 0.0) -
                                z[j] * std::conj(z[i]) / (u * (1.0 + un)));
                    EXPECT_LT(std::abs(g(i, j) - want), 1e-12 * std::abs(pref));
                }
        }
    }
}

TEST(ComplexComponents, AxisValueAndDeterminant) {
    CalabiParams p(3);
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(3);
    z[0] = 1.0;
    Eigen::MatrixXcd g = calabi_complex_components(z, p);
    EXPECT_NEAR(g(0, 0).real(), std::pow(2.0, -2.0 / 3.0), 1e-14);
    EXPECT_NEAR(g(0, 0).imag(), 0.0, 1e-15);

    // |z| kept in [0.35, 5]: the determinant has one eigenvalue ~ u^{n-1}, so
    // the LU error grows like eps/u^n toward the cone point.
    Rng rng(7);
    for (int n : {2, 3, 4, 5}) {
        CalabiParams pn(n);
        for (int trial = 0; trial < 1000; ++trial) {
            Eigen::VectorXcd w(n);
            for (int i = 0; i < n; ++i) w[i] = std::complex<double>(rng.normal(), rng.normal());
            w *= (0.35 + 4.65 * rng.uniform()) / std::sqrt(w.squaredNorm());
            std::complex<double> det = calabi_complex_components(w, pn).determinant();
            EXPECT_NEAR(det.real(), 1.0, 1e-10);
            EXPECT_NEAR(det.imag(), 0.0, 1e-10);
        }
    }
    EXPECT_THROW(calabi_complex_components(Eigen::VectorXcd::Zero(3), p), bad_argument);
}

TEST(ComplexComponents, HermitianPositiveDefinite) {
    CalabiParams p(4);
    Eigen::VectorXcd z(4);
    z << std::complex<double>(0.3, -1.1), std::complex<double>(0.9, 0.2),
        std::complex<double>(-0.5, 0.4), std::complex<double>(0.1, 0.8);
    Eigen::MatrixXcd g = calabi_complex_components(z, p);
    EXPECT_LT((g - g.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(RadialChart, FrameCoefficientsAndAxisValue) {
    CalabiParams p(3);
    FrameQuantities f = frame_quantities(1.0, p);
    EXPECT_NEAR(f.A * f.A, std::pow(2.0, -2.0 / 3.0), 1e-14);  // g_rr at r = 1
    // A(r) (1+r^{2n})^{(n-1)/2n} = r^{n-1} exactly
    for (double r : {0.3, 1.0, 2.2, 7.0}) {
        FrameQuantities q = frame_quantities(r, p);
        EXPECT_NEAR(q.A * std::pow(1.0 + std::pow(r, 6.0), 2.0 / 6.0), r * r, 1e-12 * r * r);
    }
    Vec y = Vec::Zero(6);
    y[0] = 1.0;
    Mat g = calabi_radial_components(y, p);
    EXPECT_NEAR(g(0, 0), std::pow(2.0, -2.0 / 3.0), 1e-14);
}

TEST(RadialChart, EguchiHansonCrossCheck) {
    CalabiParams p(2);
    for (double r : {0.5, 1.0, 1.7, 3.0}) {
        FrameQuantities f = frame_quantities(r, p);
        EhCoeffs eh = eguchi_hanson_oracle(r);
        EXPECT_NEAR(f.A * f.A, eh.rr, 1e-12 * eh.rr) << "r=" << r;
        EXPECT_NEAR(f.C * f.C, eh.thth, 1e-12 * eh.thth) << "r=" << r;
        EXPECT_NEAR(f.B, eh.fs, 1e-12 * eh.fs) << "r=" << r;
    }
}

// Pull the ALE-coordinate metric back through the Hopf parametrization and
// compare with the radial chart (numerical Jacobian).
TEST(RadialChart, AgreesWithComplexFormOnOverlap) {
    for (int n : {2, 3}) {
        CalabiParams p(n);
        const int m = 2 * n;
        Rng rng(13);
        for (int trial = 0; trial < 5; ++trial) {
            Vec y(m);
            y[0] = 0.6 + 2.0 * rng.uniform();
            y[1] = -2.0 + 4.0 * rng.uniform();
            for (int i = 2; i < m; ++i) y[i] = -0.5 + rng.uniform();

            auto embed = [&](const Vec& q) { return hopf_embed(q, p); };
            Mat jac(m, m);
            for (int d = 0; d < m; ++d) jac.col(d) = fd_partial(embed, y, d, 1e-4, 4);

            Mat g_ale = calabi_real_components(hopf_embed(y, p), p);
            Mat pulled = jac.transpose() * g_ale * jac;
            Mat g_rad = calabi_radial_components(y, p);
            EXPECT_LT((pulled - g_rad).cwiseAbs().maxCoeff(), 1e-8) << "n=" << n;
        }
    }
}

TEST(RadialChart, DomainMustAvoidZeroSection) {
    EXPECT_THROW(calabi_radial_chart(CalabiParams(3), 0.0), bad_argument);
}

TEST(Curvature, CalabiIsRicciFlat) {
    for (int n : {2, 3}) {
        CalabiParams p(n);
        ChartMetric chart = calabi_ale_chart(p);
        for (double r : {0.7, 1.3, 2.5}) {
            Vec x = ale_point(2 * n, r, 17 + n);
            CurvatureBundle cb = curvature(chart, x, 1e-3 * std::max(1.0, r), 4);
            double rm = cb.riemann.max_abs();
            EXPECT_LT(cb.ricci.cwiseAbs().maxCoeff(), 1e-5 * rm) << "n=" << n << " r=" << r;
        }
    }
}

TEST(Curvature, CalabiRadialChartRicciFlat) {
    CalabiParams p(3);
    ChartMetric chart = calabi_radial_chart(p);
    Vec y(6);
    y << 1.3, 0.4, 0.2, -0.1, 0.3, 0.15;
    CurvatureBundle cb = curvature(chart, y, 1e-3, 4);
    EXPECT_LT(cb.ricci.cwiseAbs().maxCoeff(), 1e-5 * cb.riemann.max_abs());
}

TEST(FrameNorms, UnitCovectorsAndFubiniStudyForm) {
    for (int n : {2, 3}) {
        CalabiParams p(n);
        ChartMetric chart = calabi_ale_chart(p);
        for (double r : {0.6, 1.4, 3.1}) {
            Vec x = ale_point(2 * n, r, 29 + n);
            double rr = x.norm();
            FrameQuantities f = frame_quantities(rr, p);
            NTensor adr(2 * n, 1), cth(2 * n, 1);
            Vec er = radial_covector(x), th = theta_covector(x);
            for (int i = 0; i < 2 * n; ++i) {
                adr(i) = f.A * er[i];
                cth(i) = f.C * th[i];
            }
            EXPECT_NEAR(inner(chart, x, adr, adr), 1.0, 1e-12);
            EXPECT_NEAR(inner(chart, x, cth, cth), 1.0, 1e-12);
            NTensor bw = from_matrix(f.B * fs_form_components(x));
            EXPECT_NEAR(inner(chart, x, bw, bw, FieldKind::Alternating), n - 1.0, 1e-11);
        }
    }
}

TEST(AleDecay, SlopeMatchesMinusTwoN) {
    std::vector<double> radii;
    for (double r = 2.0; r <= 64.0; r *= std::pow(32.0, 1.0 / 9.0)) radii.push_back(r);
    ASSERT_GE(radii.size(), 8u);
    DecayFit f2 = ale_decay_fit(CalabiParams(2), radii);
    EXPECT_FALSE(f2.degenerate);
    EXPECT_NEAR(f2.slope, -4.0, 0.2);
    DecayFit f3 = ale_decay_fit(CalabiParams(3), radii);
    EXPECT_NEAR(f3.slope, -6.0, 0.2);
}

TEST(AleDecay, EuclideanInputReportsDegenerate) {
    std::vector<double> radii;
    for (double r = 2.0; r <= 64.0; r *= std::pow(32.0, 1.0 / 9.0)) radii.push_back(r);
    DecayFit f = ale_decay_fit([](const Vec&) { return Mat::Identity(6, 6); }, 6, radii);
    EXPECT_TRUE(f.degenerate);
}

TEST(AleDecay, RejectsInsufficientRadii) {
    EXPECT_THROW(ale_decay_fit(CalabiParams(2), {2.0, 4.0, 8.0}), bad_argument);
    std::vector<double> bad(9, 1.0);
    EXPECT_THROW(ale_decay_fit(CalabiParams(2), bad), bad_argument);
}
