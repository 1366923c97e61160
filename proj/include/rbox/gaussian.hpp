#pragma once

// Gaussian modeling of rotated boxes: a box (x, y, (z), w, h, (l), theta)
// maps to N(mu, Sigma) with Sigma = R diag(w^2/4, h^2/4, (l^2/4)) R^T and the
// rotation acting in the ground plane only. The product of two Gaussians
// (Kalman-gain form) yields the fused covariance whose volume drives KFIoU.
//
// Everything is templated over the scalar type so dual numbers flow through
// the identical code path; inversion back to a box is double-only.

#include <cmath>
#include <string>

#include "rbox/dual.hpp"
#include "rbox/geometry.hpp"
#include "rbox/matrix.hpp"

namespace rbox {

template <class T, int N>
struct Gaussian {
    Vec<T, N> mu;
    Mat<T, N> sigma;
};

using Gaussian2d = Gaussian<double, 2>;
using Gaussian3d = Gaussian<double, 3>;

/// Result of multiplying two Gaussian densities: alpha * N(mu, sigma).
template <class T, int N>
struct GaussianProduct {
    Gaussian<T, N> fused;
    T alpha;               // density weight, a Gaussian in the center offset
    Mat<T, N> kalman_gain; // K = Sigma1 (Sigma1 + Sigma2)^-1
};

namespace detail {

template <class T>
void check_positive_extent(const T& e, const char* name) {
    if (!(value_of(e) > 0.0) || !std::isfinite(value_of(e)))
        throw InvalidBoxError(std::string("extent ") + name + " must be positive and finite");
}

}  // namespace detail

template <class T>
Gaussian<T, 2> box2d_to_gaussian(const T& x, const T& y, const T& w, const T& h,
                                 const T& theta_deg) {
    detail::check_positive_extent(w, "w");
    detail::check_positive_extent(h, "h");
    using std::cos;
    using std::sin;
    const T rad = theta_deg * T(kDegToRad);
    const T c = cos(rad), s = sin(rad);
    const T a = w * w / T(4);
    const T b = h * h / T(4);
    Gaussian<T, 2> g;
    g.mu[0] = x;
    g.mu[1] = y;
    g.sigma(0, 0) = c * c * a + s * s * b;
    g.sigma(1, 1) = s * s * a + c * c * b;
    g.sigma(0, 1) = c * s * (a - b);
    g.sigma(1, 0) = g.sigma(0, 1);
    return g;
}

inline Gaussian2d box2d_to_gaussian(const RotatedBox2D& b) {
    validate_box(b);
    return box2d_to_gaussian(b.x, b.y, b.w, b.h, b.theta);
}

template <class T>
Gaussian<T, 3> box3d_to_gaussian(const T& x, const T& y, const T& z, const T& w, const T& h,
                                 const T& l, const T& theta_deg) {
    detail::check_positive_extent(w, "w");
    detail::check_positive_extent(h, "h");
    detail::check_positive_extent(l, "l");
    const Gaussian<T, 2> plane = box2d_to_gaussian(x, y, w, h, theta_deg);
    Gaussian<T, 3> g;
    g.mu[0] = x;
    g.mu[1] = y;
    g.mu[2] = z;
    g.sigma(0, 0) = plane.sigma(0, 0);
    g.sigma(0, 1) = plane.sigma(0, 1);
    g.sigma(1, 0) = plane.sigma(1, 0);
    g.sigma(1, 1) = plane.sigma(1, 1);
    g.sigma(2, 2) = l * l / T(4);
    return g;
}

inline Gaussian3d box3d_to_gaussian(const RotatedBox3D& b) {
    validate_box(b);
    return box3d_to_gaussian(b.x, b.y, b.z, b.w, b.h, b.l, b.theta);
}

/// V(Sigma) = 2^n |Sigma|^(1/2): the volume of the box that maps to Sigma.
template <class T, int N>
T gaussian_volume(const Mat<T, N>& sigma) {
    using std::sqrt;
    const T d = det(sigma);
    if (!(value_of(d) > 0.0))
        throw DecompositionError("gaussian_volume requires a positive-definite covariance");
    return T(1 << N) * sqrt(d);
}

/// alpha N(mu, Sigma) = N(mu1, Sigma1) N(mu2, Sigma2) with
/// K = Sigma1 (Sigma1+Sigma2)^-1, mu = mu1 + K (mu2-mu1), Sigma = Sigma1 - K Sigma1,
/// alpha = N_{mu1}(mu2, Sigma1+Sigma2).
template <class T, int N>
GaussianProduct<T, N> gaussian_product(const Gaussian<T, N>& g1, const Gaussian<T, N>& g2) {
    using std::exp;
    using std::sqrt;
    const Mat<T, N> sum = g1.sigma + g2.sigma;
    const T sum_det = det(sum);
    if (!(value_of(sum_det) > 0.0))
        throw DecompositionError("gaussian_product: Sigma1 + Sigma2 is not positive definite");
    const Mat<T, N> sum_inv = inverse(sum);
    GaussianProduct<T, N> out;
    out.kalman_gain = g1.sigma * sum_inv;
    const Vec<T, N> delta = g2.mu - g1.mu;
    out.fused.mu = g1.mu + out.kalman_gain * delta;
    out.fused.sigma = symmetrized(g1.sigma - out.kalman_gain * g1.sigma);
    constexpr double two_pi = 6.283185307179586;
    double norm = 1.0;
    for (int i = 0; i < N; ++i) norm *= two_pi;
    const T quad = dot(delta, sum_inv * delta);
    out.alpha = exp(T(-0.5) * quad) / sqrt(T(norm) * sum_det);
    return out;
}

/// Invert N(mu, Sigma) back to the rotated box whose Gaussian model it is.
/// Near-isotropic covariances (eigenvalue gap < 1e-9) report theta = 0.
RotatedBox2D gaussian_to_box(const Gaussian2d& g);
RotatedBox3D gaussian_to_box(const Gaussian3d& g);

}  // namespace rbox
