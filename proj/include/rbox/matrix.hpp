#pragma once

// Fixed-size 2x2 / 3x3 linear algebra, templated over the scalar type so the
// same formulas evaluate on plain doubles and on forward-mode dual numbers.
// Determinant, inverse and symmetric eigendecomposition are closed-form
// (quadratic for 2x2, cyclic Jacobi for 3x3).

#include <array>
#include <cmath>
#include <cstddef>

#include "rbox/errors.hpp"

namespace rbox {

template <class T, int N>
struct Vec {
    std::array<T, N> v{};

    T& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    const T& operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

    friend Vec operator+(const Vec& a, const Vec& b) {
        Vec r;
        for (int i = 0; i < N; ++i) r[i] = a[i] + b[i];
        return r;
    }
    friend Vec operator-(const Vec& a, const Vec& b) {
        Vec r;
        for (int i = 0; i < N; ++i) r[i] = a[i] - b[i];
        return r;
    }
    friend Vec operator*(const T& s, const Vec& a) {
        Vec r;
        for (int i = 0; i < N; ++i) r[i] = s * a[i];
        return r;
    }
};

template <class T, int N>
T dot(const Vec<T, N>& a, const Vec<T, N>& b) {
    T r = a[0] * b[0];
    for (int i = 1; i < N; ++i) r = r + a[i] * b[i];
    return r;
}

template <class T, int N>
struct Mat {
    std::array<T, static_cast<std::size_t>(N) * N> m{};

    T& operator()(int r, int c) { return m[static_cast<std::size_t>(r) * N + c]; }
    const T& operator()(int r, int c) const { return m[static_cast<std::size_t>(r) * N + c]; }

    static Mat identity() {
        Mat r;
        for (int i = 0; i < N; ++i) r(i, i) = T(1);
        return r;
    }

    friend Mat operator+(const Mat& a, const Mat& b) {
        Mat r;
        for (std::size_t i = 0; i < a.m.size(); ++i) r.m[i] = a.m[i] + b.m[i];
        return r;
    }
    friend Mat operator-(const Mat& a, const Mat& b) {
        Mat r;
        for (std::size_t i = 0; i < a.m.size(); ++i) r.m[i] = a.m[i] - b.m[i];
        return r;
    }
    friend Mat operator*(const T& s, const Mat& a) {
        Mat r;
        for (std::size_t i = 0; i < a.m.size(); ++i) r.m[i] = s * a.m[i];
        return r;
    }
    friend Mat operator*(const Mat& a, const Mat& b) {
        Mat r;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                T acc = a(i, 0) * b(0, j);
                for (int k = 1; k < N; ++k) acc = acc + a(i, k) * b(k, j);
                r(i, j) = acc;
            }
        return r;
    }
    friend Vec<T, N> operator*(const Mat& a, const Vec<T, N>& x) {
        Vec<T, N> r;
        for (int i = 0; i < N; ++i) {
            T acc = a(i, 0) * x[0];
            for (int k = 1; k < N; ++k) acc = acc + a(i, k) * x[k];
            r[i] = acc;
        }
        return r;
    }
};

template <class T, int N>
Mat<T, N> transpose(const Mat<T, N>& a) {
    Mat<T, N> r;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r(i, j) = a(j, i);
    return r;
}

template <class T, int N>
T trace(const Mat<T, N>& a) {
    T r = a(0, 0);
    for (int i = 1; i < N; ++i) r = r + a(i, i);
    return r;
}

template <class T, int N>
T det(const Mat<T, N>& a) {
    if constexpr (N == 2) {
        return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    } else {
        static_assert(N == 3, "det implemented for N = 2, 3");
        return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
               a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
               a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    }
}

// value_of lets the templated numerics branch on magnitudes without caring
// whether T carries a tangent. The dual overload lives in dual.hpp.
inline double value_of(double x) { return x; }

template <class T, int N>
Mat<T, N> inverse(const Mat<T, N>& a) {
    const T d = det(a);
    if (value_of(d) == 0.0)
        throw DecompositionError("matrix is singular, cannot invert");
    if constexpr (N == 2) {
        Mat<T, 2> r;
        r(0, 0) = a(1, 1) / d;
        r(0, 1) = T(-1) * a(0, 1) / d;
        r(1, 0) = T(-1) * a(1, 0) / d;
        r(1, 1) = a(0, 0) / d;
        return r;
    } else {
        static_assert(N == 3, "inverse implemented for N = 2, 3");
        Mat<T, 3> r;  // adjugate / det
        r(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / d;
        r(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / d;
        r(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / d;
        r(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / d;
        r(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / d;
        r(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / d;
        r(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / d;
        r(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / d;
        r(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / d;
        return r;
    }
}

/// (A + A^T)/2, applied after products to suppress asymmetry drift.
template <class T, int N>
Mat<T, N> symmetrized(const Mat<T, N>& a) {
    Mat<T, N> r;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r(i, j) = (a(i, j) + a(j, i)) / T(2);
    return r;
}

template <class T, int N>
double max_asymmetry(const Mat<T, N>& a) {
    double worst = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            worst = std::max(worst, std::abs(value_of(a(i, j)) - value_of(a(j, i))));
    return worst;
}

template <int N>
struct SymEigen {
    std::array<double, N> values{};          // descending
    std::array<Vec<double, N>, N> vectors{}; // unit, values[i] <-> vectors[i]
};

/// Closed-form eigendecomposition of a symmetric 2x2 matrix.
inline SymEigen<2> sym_eigen(const Mat<double, 2>& a) {
    SymEigen<2> e;
    const double tr = a(0, 0) + a(1, 1);
    const double df = a(0, 0) - a(1, 1);
    const double b = 0.5 * (a(0, 1) + a(1, 0));
    const double disc = std::sqrt(df * df + 4.0 * b * b);
    e.values = {0.5 * (tr + disc), 0.5 * (tr - disc)};
    Vec<double, 2> v;
    if (std::abs(b) > 1e-300) {
        v[0] = b;
        v[1] = e.values[0] - a(0, 0);
    } else if (df >= 0.0) {
        v[0] = 1.0;
        v[1] = 0.0;
    } else {
        v[0] = 0.0;
        v[1] = 1.0;
    }
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1]);
    v[0] /= n;
    v[1] /= n;
    e.vectors[0] = v;
    e.vectors[1][0] = -v[1];
    e.vectors[1][1] = v[0];
    return e;
}

/// Cyclic Jacobi for a symmetric 3x3 matrix.
inline SymEigen<3> sym_eigen(const Mat<double, 3>& a) {
    Mat<double, 3> d = symmetrized(a);
    Mat<double, 3> q = Mat<double, 3>::identity();
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 3; ++p)
            for (int r = p + 1; r < 3; ++r) off += d(p, r) * d(p, r);
        if (off < 1e-30) break;
        for (int p = 0; p < 3; ++p) {
            for (int r = p + 1; r < 3; ++r) {
                if (d(p, r) == 0.0) continue;
                const double theta = 0.5 * std::atan2(2.0 * d(p, r), d(r, r) - d(p, p));
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                for (int k = 0; k < 3; ++k) {
                    const double dpk = d(p, k), drk = d(r, k);
                    d(p, k) = c * dpk - s * drk;
                    d(r, k) = s * dpk + c * drk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double dkp = d(k, p), dkr = d(k, r);
                    d(k, p) = c * dkp - s * dkr;
                    d(k, r) = s * dkp + c * dkr;
                    const double qkp = q(k, p), qkr = q(k, r);
                    q(k, p) = c * qkp - s * qkr;
                    q(k, r) = s * qkp + c * qkr;
                }
            }
        }
    }
    SymEigen<3> e;
    std::array<int, 3> order = {0, 1, 2};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (d(order[j], order[j]) > d(order[i], order[i])) std::swap(order[i], order[j]);
    for (int i = 0; i < 3; ++i) {
        e.values[static_cast<std::size_t>(i)] = d(order[i], order[i]);
        for (int k = 0; k < 3; ++k) e.vectors[static_cast<std::size_t>(i)][k] = q(k, order[i]);
    }
    return e;
}

/// Principal square root of a symmetric positive definite matrix.
template <int N>
Mat<double, N> spd_sqrt(const Mat<double, N>& a) {
    const SymEigen<N> e = sym_eigen(a);
    Mat<double, N> r;
    for (int i = 0; i < N; ++i) {
        if (e.values[static_cast<std::size_t>(i)] <= 0.0)
            throw DecompositionError("matrix square root requires positive eigenvalues");
        const double s = std::sqrt(e.values[static_cast<std::size_t>(i)]);
        for (int p = 0; p < N; ++p)
            for (int q2 = 0; q2 < N; ++q2)
                r(p, q2) += s * e.vectors[static_cast<std::size_t>(i)][p] *
                            e.vectors[static_cast<std::size_t>(i)][q2];
    }
    return r;
}

using Vec2d = Vec<double, 2>;
using Vec3d = Vec<double, 3>;
using Mat2d = Mat<double, 2>;
using Mat3d = Mat<double, 3>;

}  // namespace rbox
