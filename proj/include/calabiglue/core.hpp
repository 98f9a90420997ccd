// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace calabiglue {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---- errors ----------------------------------------------------------------

struct point_outside_domain : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct singular_metric : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct valence_mismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct bad_argument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ingestion_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- small dense tensors ----------------------------------------------------

// Rank-3 array T(k,i,j), dimension n per index.
struct Tensor3 {
    int n = 0;
    std::vector<double> v;

    Tensor3() = default;
    explicit Tensor3(int n_) : n(n_), v(static_cast<size_t>(n_) * n_ * n_, 0.0) {}

    double& operator()(int a, int b, int c) { return v[(static_cast<size_t>(a) * n + b) * n + c]; }
    double operator()(int a, int b, int c) const { return v[(static_cast<size_t>(a) * n + b) * n + c]; }

    double max_abs() const {
        double m = 0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
};

// Rank-4 array T(i,j,k,l), dimension n per index.
struct Tensor4 {
    int n = 0;
    std::vector<double> v;

    Tensor4() = default;
    explicit Tensor4(int n_) : n(n_), v(static_cast<size_t>(n_) * n_ * n_ * n_, 0.0) {}

    double& operator()(int i, int j, int k, int l) {
        return v[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return v[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
    }

    double max_abs() const {
        double m = 0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
};

// Dense covariant tensor of arbitrary rank (all indices dimension `dim`).
// Rank 0 is a scalar stored in v[0].
struct NTensor {
    int dim = 0;
    int rank = 0;
    std::vector<double> v;

    NTensor() = default;
    NTensor(int dim_, int rank_) : dim(dim_), rank(rank_) {
        size_t sz = 1;
        for (int r = 0; r < rank_; ++r) sz *= static_cast<size_t>(dim_);
        v.assign(sz, 0.0);
    }

    size_t size() const { return v.size(); }

    size_t flat(std::initializer_list<int> idx) const {
        size_t f = 0;
        for (int i : idx) f = f * dim + static_cast<size_t>(i);
        return f;
    }
    double& at(std::initializer_list<int> idx) { return v[flat(idx)]; }
    double at(std::initializer_list<int> idx) const { return v[flat(idx)]; }

    double& operator()(int i) { return v[static_cast<size_t>(i)]; }
    double operator()(int i) const { return v[static_cast<size_t>(i)]; }
    double& operator()(int i, int j) { return v[static_cast<size_t>(i) * dim + j]; }
    double operator()(int i, int j) const { return v[static_cast<size_t>(i) * dim + j]; }
    double& operator()(int i, int j, int k) { return v[(static_cast<size_t>(i) * dim + j) * dim + k]; }
    double operator()(int i, int j, int k) const { return v[(static_cast<size_t>(i) * dim + j) * dim + k]; }
    double& operator()(int i, int j, int k, int l) {
        return v[((static_cast<size_t>(i) * dim + j) * dim + k) * dim + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return v[((static_cast<size_t>(i) * dim + j) * dim + k) * dim + l];
    }

    double max_abs() const {
        double m = 0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }

    NTensor& operator+=(const NTensor& o) {
        for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
    NTensor& operator-=(const NTensor& o) {
        for (size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
        return *this;
    }
    NTensor& operator*=(double s) {
        for (double& x : v) x *= s;
        return *this;
    }
};

inline NTensor operator+(NTensor a, const NTensor& b) { return a += b; }
inline NTensor operator-(NTensor a, const NTensor& b) { return a -= b; }
inline NTensor operator*(double s, NTensor a) { return a *= s; }

inline NTensor from_matrix(const Mat& m) {
    NTensor t(static_cast<int>(m.rows()), 2);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) t(i, j) = m(i, j);
    return t;
}

inline Mat to_matrix(const NTensor& t) {
    if (t.rank != 2) throw valence_mismatch("to_matrix: rank-2 tensor required");
    Mat m(t.dim, t.dim);
    for (int i = 0; i < t.dim; ++i)
        for (int j = 0; j < t.dim; ++j) m(i, j) = t(i, j);
    return m;
}

// ---- finite differences ------------------------------------------------------

// Central first derivative of f along coordinate `dir` at p; order 2 or 4.
template <class F>
auto fd_partial(const F& f, const Vec& p, int dir, double h, int order = 2) -> decltype(f(p)) {
    Vec q = p;
    if (order <= 2) {
        q[dir] = p[dir] + h;
        auto fp = f(q);
        q[dir] = p[dir] - h;
        auto fm = f(q);
        fp -= fm;
        fp *= 1.0 / (2.0 * h);
        return fp;
    }
    q[dir] = p[dir] + 2 * h;
    auto r = f(q);
    r *= -1.0;
    q[dir] = p[dir] + h;
    auto f1 = f(q);
    f1 *= 8.0;
    r += f1;
    q[dir] = p[dir] - h;
    auto f2 = f(q);
    f2 *= -8.0;
    r += f2;
    q[dir] = p[dir] - 2 * h;
    r += f(q);
    r *= 1.0 / (12.0 * h);
    return r;
}

inline double fd_partial_scalar(const std::function<double(const Vec&)>& f, const Vec& p, int dir,
                                double h, int order = 2) {
    Vec q = p;
    if (order <= 2) {
        q[dir] = p[dir] + h;
        double fp = f(q);
        q[dir] = p[dir] - h;
        return (fp - f(q)) / (2 * h);
    }
    q[dir] = p[dir] + 2 * h;
    double a = f(q);
    q[dir] = p[dir] + h;
    double b = f(q);
    q[dir] = p[dir] - h;
    double c = f(q);
    q[dir] = p[dir] - 2 * h;
    double d = f(q);
    return (-a + 8 * b - 8 * c + d) / (12 * h);
}

// ---- geometry-free helpers ----------------------------------------------------

// Total volume of the unit k-sphere S^k in R^{k+1}.
inline double sphere_volume(int k) {
    double half = 0.5 * (k + 1);
    return 2.0 * std::pow(M_PI, half) / std::tgamma(half);
}

inline int factorial(int k) {
    int r = 1;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

// ---- deterministic RNG ---------------------------------------------------------

// mt19937_64 with hand-rolled transforms so streams are identical across
// standard libraries.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(uint64_t seed) : gen(seed) {}

    double uniform() {  // [0,1)
        return (gen() >> 11) * 0x1.0p-53;
    }

    // Box-Muller pair; second value cached.
    bool have_spare = false;
    double spare = 0;
    double normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        double u1 = 0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare = r * std::sin(a);
        have_spare = true;
        return r * std::cos(a);
    }

    // Uniform point on S^{m-1}.
    Vec sphere_point(int m) {
        Vec x(m);
        double n2 = 0;
        do {
            for (int i = 0; i < m; ++i) x[i] = normal();
            n2 = x.squaredNorm();
        } while (n2 == 0.0);
        return x / std::sqrt(n2);
    }
};

// Substream seed for shard s of a base seed.
inline uint64_t shard_seed(uint64_t seed, uint64_t s) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (s + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// ---- least squares on log-log data ----------------------------------------------

struct LogLogFit {
    double slope = 0;
    double intercept = 0;  // log-intercept
    bool degenerate = false;
};

// Fits log(y) = slope*log(x) + intercept. Values of y at or below `floor`
// mark the fit degenerate (data at noise level).
inline LogLogFit loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                            double floor_ = 1e-14) {
    LogLogFit out;
    if (xs.size() != ys.size() || xs.size() < 2) throw bad_argument("loglog_fit: need >= 2 samples");
    for (double y : ys)
        if (!(y > floor_)) {
            out.degenerate = true;
            return out;
        }
    const int n = static_cast<int>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double det = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / det;
    out.intercept = (sy * sxx - sx * sxy) / det;
    return out;
}

// ---- misc -----------------------------------------------------------------------

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline int env_thread_count(const char* var = "CALABIGLUE_THREADS") {
    const char* s = std::getenv(var);
    if (!s) return 1;
    int v = std::atoi(s);
    return v > 0 ? v : 1;
}

}  // namespace calabiglue
