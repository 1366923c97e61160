#pragma once

// Regression losses over Gaussian-modeled rotated boxes.
//
// KFIoU = V(Sigma_kf) / (V(Sigma1) + V(Sigma2) - V(Sigma_kf)) where Sigma_kf
// is the Gaussian-product covariance. It depends on the covariances only, is
// bounded by 1/(2^(n/2+1)-1), and is invariant under the (w,h,theta) ->
// (h,w,theta+90) parameterization swap, which is what removes the boundary
// discontinuity of offset-based losses.
//
// The combined regression loss is L_c + L_kf: a center-point term that
// closes the distance between the two means plus a KFIoU term that shapes
// the overlap. GWD / KLD / Smooth-L1 baselines live here too.

#include <cmath>
#include <utility>

#include "rbox/gaussian.hpp"

namespace rbox {

enum class KfLossForm : std::uint8_t {
    Exp,            // e^(1 - KFIoU) - 1
    Linear,         // 1 - KFIoU
    NegLog,         // -ln(KFIoU + eps)
    ExpRescaled,    // e^(1 - c KFIoU) - 1, c = 2^(n/2+1) - 1
    NegLogRescaled, // -ln(c KFIoU + eps)
};

enum class CenterLossForm : std::uint8_t {
    SmoothL1, // smooth-L1 on encoded (t_x, t_y) offsets
    KldTerm,  // ln((mu2-mu1)^T Sigma1^-1 (mu2-mu1) + 1), target-anchored
};

enum class DistTransform : std::uint8_t { Sqrt, Log1p };

enum class AngleEncoding : std::uint8_t { Direct, Indirect };

struct LossConfig {
    KfLossForm kf_form = KfLossForm::Exp;
    double epsilon = 1e-6;  // guard for the log forms
    CenterLossForm center_form = CenterLossForm::SmoothL1;
    bool rescale = true;    // stretch KFIoU by its upper bound in similarity mappings
    double lambda1 = 0.01;  // regression weight of the multi-task loss
    double smooth_l1_sigma = 3.0;  // transition at 1/sigma^2
    double gwd_tau = 1.0;
    DistTransform gwd_f = DistTransform::Sqrt;
    double kld_tau = 1.0;
    DistTransform kld_f = DistTransform::Log1p;
    bool kld_pred_first = true;  // divergence direction D(pred || target)
};

/// Dimensionless box offsets relative to an anchor. The angle is carried
/// either as a radian offset (Direct) or as an absolute (sin, cos) pair
/// (Indirect). Unused slots stay zero.
template <class T>
struct EncodedBoxT {
    T tx{}, ty{}, tw{}, th{};
    T t_theta{};
    T t_sin{}, t_cos{};
    AngleEncoding mode = AngleEncoding::Direct;
};

using EncodedBox = EncodedBoxT<double>;

/// Box parameters as a scalar pack, the seed point for dual-number gradients.
template <class T>
struct Box2Params {
    T x, y, w, h, theta;
};

template <class T>
struct Box3Params {
    T x, y, z, w, h, l, theta;
};

inline Box2Params<double> params_of(const RotatedBox2D& b) {
    return {b.x, b.y, b.w, b.h, b.theta};
}
inline Box3Params<double> params_of(const RotatedBox3D& b) {
    return {b.x, b.y, b.z, b.w, b.h, b.l, b.theta};
}

inline constexpr double kfiou_rescale_factor(int n) {
    return n == 2 ? 3.0 : 4.656854249492381;  // 2^(n/2+1) - 1
}
inline constexpr double kfiou_upper_bound(int n) {
    return 1.0 / kfiou_rescale_factor(n);
}

template <class T, int N>
T kfiou(const Gaussian<T, N>& g1, const Gaussian<T, N>& g2) {
    const GaussianProduct<T, N> prod = gaussian_product(g1, g2);
    const T v = gaussian_volume<T, N>(prod.fused.sigma);
    const T v1 = gaussian_volume<T, N>(g1.sigma);
    const T v2 = gaussian_volume<T, N>(g2.sigma);
    return v / (v1 + v2 - v);
}

template <class T, int N>
T kfiou_rescaled(const Gaussian<T, N>& g1, const Gaussian<T, N>& g2) {
    return T(kfiou_rescale_factor(N)) * kfiou(g1, g2);
}

inline double kfiou(const RotatedBox2D& a, const RotatedBox2D& b) {
    return kfiou(box2d_to_gaussian(a), box2d_to_gaussian(b));
}
inline double kfiou(const RotatedBox3D& a, const RotatedBox3D& b) {
    return kfiou(box3d_to_gaussian(a), box3d_to_gaussian(b));
}

template <class T>
T apply_kf_loss_form(const T& kf, int n, KfLossForm form, double epsilon) {
    using std::exp;
    using std::log;
    const T c = T(kfiou_rescale_factor(n));
    switch (form) {
        case KfLossForm::Exp: return exp(T(1) - kf) - T(1);
        case KfLossForm::Linear: return T(1) - kf;
        case KfLossForm::NegLog: return T(-1) * log(kf + T(epsilon));
        case KfLossForm::ExpRescaled: return exp(T(1) - c * kf) - T(1);
        case KfLossForm::NegLogRescaled: return T(-1) * log(c * kf + T(epsilon));
    }
    return T(0);
}

/// Piecewise smooth-L1: quadratic below the 1/sigma^2 transition, linear above.
template <class T>
T smooth_l1(const T& d, double sigma) {
    using rbox::abs;
    using std::abs;
    const double beta = 1.0 / (sigma * sigma);
    const T a = abs(d);
    if (value_of(a) < beta) return T(0.5 * sigma * sigma) * d * d;
    return a - T(0.5 * beta);
}

template <class T>
EncodedBoxT<T> encode_box(const Box2Params<T>& b, const RotatedBox2D& anchor,
                          AngleEncoding mode) {
    validate_box(anchor);
    detail::check_positive_extent(b.w, "w");
    detail::check_positive_extent(b.h, "h");
    using std::cos;
    using std::log;
    using std::sin;
    EncodedBoxT<T> e;
    e.mode = mode;
    e.tx = (b.x - T(anchor.x)) / T(anchor.w);
    e.ty = (b.y - T(anchor.y)) / T(anchor.h);
    e.tw = log(b.w / T(anchor.w));
    e.th = log(b.h / T(anchor.h));
    if (mode == AngleEncoding::Direct) {
        e.t_theta = (b.theta - T(anchor.theta)) * T(kDegToRad);
    } else {
        e.t_sin = sin(b.theta * T(kDegToRad));
        e.t_cos = cos(b.theta * T(kDegToRad));
    }
    return e;
}

inline EncodedBox encode_box(const RotatedBox2D& b, const RotatedBox2D& anchor,
                             AngleEncoding mode = AngleEncoding::Direct) {
    validate_box(b);
    return encode_box(params_of(b), anchor, mode);
}

RotatedBox2D decode_box(const EncodedBox& e, const RotatedBox2D& anchor);

/// Project (s, c) onto the unit circle; the zero vector has no direction.
std::pair<double, double> normalize_angle_pair(double s, double c);

template <class T>
T center_loss_smooth_l1(const EncodedBoxT<T>& pred, const EncodedBoxT<T>& gt, double sigma) {
    return smooth_l1(pred.tx - gt.tx, sigma) + smooth_l1(pred.ty - gt.ty, sigma);
}

/// ln((mu2-mu1)^T Sigma1^-1 (mu2-mu1) + 1): center error measured in the
/// shape metric of the Sigma1 Gaussian.
template <class T, int N>
T center_loss_kld_term(const Vec<T, N>& mu1, const Vec<T, N>& mu2, const Mat<T, N>& sigma1) {
    using rbox::log1p;
    using std::log1p;
    const Vec<T, N> d = mu2 - mu1;
    return log1p(dot(d, inverse(sigma1) * d));
}

/// Smooth-L1 over all encoded offsets (the classic box-regression baseline).
template <class T>
T smooth_l1_box_loss(const EncodedBoxT<T>& pred, const EncodedBoxT<T>& gt, double sigma) {
    T loss = center_loss_smooth_l1(pred, gt, sigma) + smooth_l1(pred.tw - gt.tw, sigma) +
             smooth_l1(pred.th - gt.th, sigma);
    if (pred.mode == AngleEncoding::Direct)
        return loss + smooth_l1(pred.t_theta - gt.t_theta, sigma);
    return loss + smooth_l1(pred.t_sin - gt.t_sin, sigma) + smooth_l1(pred.t_cos - gt.t_cos, sigma);
}

template <class T>
T kf_loss(const Box2Params<T>& b1, const Box2Params<T>& b2, const LossConfig& cfg) {
    const auto g1 = box2d_to_gaussian(b1.x, b1.y, b1.w, b1.h, b1.theta);
    const auto g2 = box2d_to_gaussian(b2.x, b2.y, b2.w, b2.h, b2.theta);
    return apply_kf_loss_form(kfiou(g1, g2), 2, cfg.kf_form, cfg.epsilon);
}

template <class T>
T kf_loss(const Box3Params<T>& b1, const Box3Params<T>& b2, const LossConfig& cfg) {
    const auto g1 = box3d_to_gaussian(b1.x, b1.y, b1.z, b1.w, b1.h, b1.l, b1.theta);
    const auto g2 = box3d_to_gaussian(b2.x, b2.y, b2.z, b2.w, b2.h, b2.l, b2.theta);
    return apply_kf_loss_form(kfiou(g1, g2), 3, cfg.kf_form, cfg.epsilon);
}

inline double kf_loss(const RotatedBox2D& a, const RotatedBox2D& b, const LossConfig& cfg) {
    return kf_loss(params_of(a), params_of(b), cfg);
}
inline double kf_loss(const RotatedBox3D& a, const RotatedBox3D& b, const LossConfig& cfg) {
    return kf_loss(params_of(a), params_of(b), cfg);
}

/// L_reg = L_c + L_kf against the ground truth, offsets taken w.r.t. anchor.
template <class T>
T regression_loss(const Box2Params<T>& pred, const RotatedBox2D& gt, const RotatedBox2D& anchor,
                  const LossConfig& cfg) {
    const auto g_pred = box2d_to_gaussian(pred.x, pred.y, pred.w, pred.h, pred.theta);
    const Gaussian2d g_gt_d = box2d_to_gaussian(gt);
    Gaussian<T, 2> g_gt;
    for (int i = 0; i < 2; ++i) {
        g_gt.mu[i] = T(g_gt_d.mu[i]);
        for (int j = 0; j < 2; ++j) g_gt.sigma(i, j) = T(g_gt_d.sigma(i, j));
    }
    T center;
    if (cfg.center_form == CenterLossForm::SmoothL1) {
        const auto pe = encode_box(pred, anchor, AngleEncoding::Direct);
        const auto ge = encode_box(Box2Params<T>{T(gt.x), T(gt.y), T(gt.w), T(gt.h), T(gt.theta)},
                                   anchor, AngleEncoding::Direct);
        center = center_loss_smooth_l1(pe, ge, cfg.smooth_l1_sigma);
    } else {
        center = center_loss_kld_term(g_pred.mu, g_gt.mu, g_gt.sigma);
    }
    const T kf = kfiou(g_pred, g_gt);
    return center + apply_kf_loss_form(kf, 2, cfg.kf_form, cfg.epsilon);
}

template <class T>
T regression_loss(const Box3Params<T>& pred, const RotatedBox3D& gt, const RotatedBox3D& anchor,
                  const LossConfig& cfg) {
    validate_box(anchor);
    const auto g_pred = box3d_to_gaussian(pred.x, pred.y, pred.z, pred.w, pred.h, pred.l, pred.theta);
    const Gaussian3d g_gt_d = box3d_to_gaussian(gt);
    Gaussian<T, 3> g_gt;
    for (int i = 0; i < 3; ++i) {
        g_gt.mu[i] = T(g_gt_d.mu[i]);
        for (int j = 0; j < 3; ++j) g_gt.sigma(i, j) = T(g_gt_d.sigma(i, j));
    }
    T center;
    if (cfg.center_form == CenterLossForm::SmoothL1) {
        // 2-D offset encoding extended with t_z = (z - z_a) / l_a
        center = smooth_l1((pred.x - T(gt.x)) / T(anchor.w), cfg.smooth_l1_sigma) +
                 smooth_l1((pred.y - T(gt.y)) / T(anchor.h), cfg.smooth_l1_sigma) +
                 smooth_l1((pred.z - T(gt.z)) / T(anchor.l), cfg.smooth_l1_sigma);
    } else {
        center = center_loss_kld_term(g_pred.mu, g_gt.mu, g_gt.sigma);
    }
    const T kf = kfiou(g_pred, g_gt);
    return center + apply_kf_loss_form(kf, 3, cfg.kf_form, cfg.epsilon);
}

inline double regression_loss(const RotatedBox2D& pred, const RotatedBox2D& gt,
                              const RotatedBox2D& anchor, const LossConfig& cfg) {
    validate_box(pred);
    return regression_loss(params_of(pred), gt, anchor, cfg);
}
inline double regression_loss(const RotatedBox3D& pred, const RotatedBox3D& gt,
                              const RotatedBox3D& anchor, const LossConfig& cfg) {
    validate_box(pred);
    return regression_loss(params_of(pred), gt, anchor, cfg);
}

/// lambda1 * L_reg, the regression term as it enters the multi-task loss.
inline double weighted_regression_loss(const RotatedBox2D& pred, const RotatedBox2D& gt,
                                       const RotatedBox2D& anchor, const LossConfig& cfg) {
    return cfg.lambda1 * regression_loss(pred, gt, anchor, cfg);
}

// --- distribution-distance baselines (double-only; no gradients needed) ---

/// Squared 2-Wasserstein distance between Gaussians.
template <int N>
double gwd_distance(const Gaussian<double, N>& g1, const Gaussian<double, N>& g2);

/// KL(g1 || g2) for Gaussians, closed form.
template <int N>
double kld_divergence(const Gaussian<double, N>& g1, const Gaussian<double, N>& g2);

double apply_dist_transform(double d, DistTransform f);

/// 1 - 1/(tau + f(D)) wrappers around the two distances.
template <int N>
double gwd_loss(const Gaussian<double, N>& g1, const Gaussian<double, N>& g2, double tau,
                DistTransform f) {
    return 1.0 - 1.0 / (tau + apply_dist_transform(gwd_distance(g1, g2), f));
}

template <int N>
double kld_loss(const Gaussian<double, N>& pred, const Gaussian<double, N>& target, double tau,
                DistTransform f) {
    return 1.0 - 1.0 / (tau + apply_dist_transform(kld_divergence(pred, target), f));
}

const char* to_string(KfLossForm f);
const char* to_string(CenterLossForm f);
const char* to_string(DistTransform f);
const char* to_string(AngleEncoding m);
const char* to_string(AngleConvention c);

}  // namespace rbox
