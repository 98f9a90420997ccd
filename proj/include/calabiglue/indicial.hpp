// SPDX-License-Identifier: MIT
#pragma once

#include "calabiglue/core.hpp"

#include <array>
#include <vector>

namespace calabiglue {

// Geometric operators on an asymptotically hyperbolic space whose indicial
// roots we tabulate:
//   P0 = Delta_H - 2 Ric            on functions
//   P1 = B delta^* = (Delta_H - 2Ric)/2   on one-forms
//   P2 = Delta_H - 2 Ric            on two-forms
//   P  = nabla*nabla/2 - ring-R     on trace-free symmetric 2-tensors
enum class OperatorKind { P0, P1, P2, P };

// Boundary eigenbundle branch. P0 has a single branch; P1 splits into
// tangential/normal one-forms, P2 into tangential/mixed two-forms, P into
// V0/V1/V2.
enum class Branch { Single, Tangential, Normal, Mixed, V0, V1, V2 };

inline const char* to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::P0: return "P0";
        case OperatorKind::P1: return "P1";
        case OperatorKind::P2: return "P2";
        case OperatorKind::P: return "P";
    }
    return "?";
}

inline const char* to_string(Branch b) {
    switch (b) {
        case Branch::Single: return "single";
        case Branch::Tangential: return "tangential";
        case Branch::Normal: return "normal";
        case Branch::Mixed: return "mixed";
        case Branch::V0: return "V0";
        case Branch::V1: return "V1";
        case Branch::V2: return "V2";
    }
    return "?";
}

inline std::vector<Branch> branches(OperatorKind k) {
    switch (k) {
        case OperatorKind::P0: return {Branch::Single};
        case OperatorKind::P1: return {Branch::Tangential, Branch::Normal};
        case OperatorKind::P2: return {Branch::Tangential, Branch::Mixed};
        case OperatorKind::P: return {Branch::V0, Branch::V1, Branch::V2};
    }
    return {};
}

inline bool branch_valid(OperatorKind k, Branch b) {
    for (Branch x : branches(k))
        if (x == b) return true;
    return false;
}

// Zeroth-order eigenvalue mu of the radial model operator on the branch, and
// the constant term c of the indicial quadratic -delta^2 + (m-1) delta + c.
// P1 and P carry a 1/2 in front of the rough Laplacian, so c = 2 mu there;
// c = mu for P0 and P2.
struct EigenbundleConstant {
    Branch branch = Branch::Single;
    double mu = 0;
    double ode_constant = 0;
};

inline EigenbundleConstant eigenbundle_constant(OperatorKind k, Branch b, int m) {
    if (!branch_valid(k, b)) throw bad_argument("invalid branch for operator kind");
    EigenbundleConstant e;
    e.branch = b;
    switch (k) {
        case OperatorKind::P0:
            e.mu = 2.0 * (m - 1);
            e.ode_constant = e.mu;
            break;
        case OperatorKind::P1:
            // tangential one-forms pair with the m-quadratic, normal with 2(m-1)
            e.mu = (b == Branch::Tangential) ? m / 2.0 : m - 1.0;
            e.ode_constant = 2.0 * e.mu;
            break;
        case OperatorKind::P2:
            e.mu = (b == Branch::Tangential) ? 4.0 : static_cast<double>(m);
            e.ode_constant = e.mu;
            break;
        case OperatorKind::P:
            e.mu = (b == Branch::V0) ? 0.0 : (b == Branch::V1 ? m / 2.0 : m - 1.0);
            e.ode_constant = 2.0 * e.mu;
            break;
    }
    return e;
}

inline std::vector<EigenbundleConstant> eigenbundle_constants(OperatorKind k, int m) {
    std::vector<EigenbundleConstant> out;
    for (Branch b : branches(k)) out.push_back(eigenbundle_constant(k, b, m));
    return out;
}

// Roots of -delta^2 + (m-1) delta + c = 0; delta_plus + delta_minus = m-1.
struct RootPair {
    double delta_plus = 0;
    double delta_minus = 0;
};

inline RootPair indicial_roots(OperatorKind k, Branch b, int m) {
    if (m < 3) throw bad_argument("indicial_roots: m >= 3 required");
    double c = eigenbundle_constant(k, b, m).ode_constant;
    double disc = (m - 1.0) * (m - 1.0) + 4.0 * c;
    double sq = std::sqrt(disc);
    RootPair r;
    r.delta_plus = 0.5 * ((m - 1.0) + sq);
    r.delta_minus = 0.5 * ((m - 1.0) - sq);
    return r;
}

// Radial part of the hyperbolic Laplacian on dr^2 + sinh^2(r) g_{S^{m-1}}:
//   f'' + (m-1) coth(r) f'.
inline double hyperbolic_radial_laplacian(const std::function<double(double)>& f, double r, int m,
                                          double step = 1e-4) {
    if (!(r > 0)) throw bad_argument("hyperbolic_radial_laplacian: r > 0 required");
    double fp = (f(r + step) - f(r - step)) / (2.0 * step);
    double fpp = (f(r + step) - 2.0 * f(r) + f(r - step)) / (step * step);
    return fpp + (m - 1.0) * std::cosh(r) / std::sinh(r) * fp;
}

// Residual of f = e^{-delta r} in the radial model ODE
//   -f'' - (m-1) k(r) f' + c f,  k = 1 (limiting) or coth(r) (exact).
// Zero exactly at indicial roots in the limiting mode; O(coth(r)-1) otherwise.
inline double model_ode_residual(OperatorKind kind, Branch b, double delta, double r, int m,
                                 bool exact_coth = false) {
    double c = eigenbundle_constant(kind, b, m).ode_constant;
    double k = exact_coth ? std::cosh(r) / std::sinh(r) : 1.0;
    double f = std::exp(-delta * r);
    return (-delta * delta + (m - 1.0) * k * delta + c) * f;
}

}  // namespace calabiglue
