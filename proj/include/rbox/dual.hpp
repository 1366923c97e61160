#pragma once

// Forward-mode dual numbers with a fixed-width tangent (one slot per box
// parameter: 5 in 2-D, 7 in 3-D). Arithmetic implements the chain rule
// exactly, so pushing Dual values through the Gaussian/loss pipeline yields
// analytic gradients from the same code path that computes plain values.

#include <array>
#include <cmath>
#include <cstddef>

namespace rbox {

template <int N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // constant: zero tangent
    Dual(double value, int slot) : v(value) { d[static_cast<std::size_t>(slot)] = 1.0; }

    friend Dual operator-(const Dual& a) {
        Dual r;
        r.v = -a.v;
        for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
        return r;
    }
    friend Dual operator+(const Dual& a, const Dual& b) {
        Dual r;
        r.v = a.v + b.v;
        for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
        return r;
    }
    friend Dual operator-(const Dual& a, const Dual& b) {
        Dual r;
        r.v = a.v - b.v;
        for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
        return r;
    }
    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual r;
        r.v = a.v * b.v;
        for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
        return r;
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        Dual r;
        r.v = a.v / b.v;
        const double ib2 = 1.0 / (b.v * b.v);
        for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * ib2;
        return r;
    }

    friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
    friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
    friend bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
    friend bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
};

template <int N>
double value_of(const Dual<N>& x) {
    return x.v;
}

template <int N>
Dual<N> chain(const Dual<N>& x, double fv, double dfdx) {
    Dual<N> r;
    r.v = fv;
    for (int i = 0; i < N; ++i) r.d[i] = dfdx * x.d[i];
    return r;
}

template <int N>
Dual<N> sqrt(const Dual<N>& x) {
    const double s = std::sqrt(x.v);
    return chain(x, s, 0.5 / s);
}

template <int N>
Dual<N> exp(const Dual<N>& x) {
    const double e = std::exp(x.v);
    return chain(x, e, e);
}

template <int N>
Dual<N> log(const Dual<N>& x) {
    return chain(x, std::log(x.v), 1.0 / x.v);
}

template <int N>
Dual<N> log1p(const Dual<N>& x) {
    return chain(x, std::log1p(x.v), 1.0 / (1.0 + x.v));
}

template <int N>
Dual<N> sin(const Dual<N>& x) {
    return chain(x, std::sin(x.v), std::cos(x.v));
}

template <int N>
Dual<N> cos(const Dual<N>& x) {
    return chain(x, std::cos(x.v), -std::sin(x.v));
}

// Derivative of |x| at 0 is taken as 0; callers keep arguments off the kink.
template <int N>
Dual<N> abs(const Dual<N>& x) {
    if (x.v > 0.0) return x;
    if (x.v < 0.0) return -x;
    return Dual<N>(0.0);
}

}  // namespace rbox
