#include "rbox/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace rbox {

RotatedBox2D decode_box(const EncodedBox& e, const RotatedBox2D& anchor) {
    validate_box(anchor);
    RotatedBox2D b;
    b.x = e.tx * anchor.w + anchor.x;
    b.y = e.ty * anchor.h + anchor.y;
    b.w = std::exp(e.tw) * anchor.w;
    b.h = std::exp(e.th) * anchor.h;
    if (e.mode == AngleEncoding::Direct)
        b.theta = anchor.theta + e.t_theta / kDegToRad;
    else
        b.theta = std::atan2(e.t_sin, e.t_cos) / kDegToRad;
    b.convention = anchor.convention;
    return b;
}

std::pair<double, double> normalize_angle_pair(double s, double c) {
    const double r = std::sqrt(s * s + c * c);
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("normalize_angle_pair: (sin, cos) pair has no direction");
    return {s / r, c / r};
}

double apply_dist_transform(double d, DistTransform f) {
    return f == DistTransform::Sqrt ? std::sqrt(std::max(0.0, d)) : std::log1p(std::max(0.0, d));
}

template <int N>
double gwd_distance(const Gaussian<double, N>& g1, const Gaussian<double, N>& g2) {
    const Vec<double, N> d = g1.mu - g2.mu;
    double dist = dot(d, d) + trace(g1.sigma) + trace(g2.sigma);
    if constexpr (N == 2) {
        // tr((S1^1/2 S2 S1^1/2)^1/2) = sqrt(tr(S1 S2) + 2 sqrt(det S1 det S2))
        const double cross = trace(g1.sigma * g2.sigma) +
                             2.0 * std::sqrt(std::max(0.0, det(g1.sigma) * det(g2.sigma)));
        dist -= 2.0 * std::sqrt(std::max(0.0, cross));
    } else {
        const Mat<double, N> root = spd_sqrt(g1.sigma);
        const SymEigen<N> e = sym_eigen(symmetrized(root * g2.sigma * root));
        double tr_root = 0.0;
        for (double v : e.values) tr_root += std::sqrt(std::max(0.0, v));
        dist -= 2.0 * tr_root;
    }
    return std::max(0.0, dist);
}

template <int N>
double kld_divergence(const Gaussian<double, N>& g1, const Gaussian<double, N>& g2) {
    const double det1 = det(g1.sigma);
    const double det2 = det(g2.sigma);
    if (!(det1 > 0.0) || !(det2 > 0.0))
        throw DecompositionError("kld_divergence requires positive-definite covariances");
    const Mat<double, N> inv2 = inverse(g2.sigma);
    const Vec<double, N> d = g2.mu - g1.mu;
    const double quad = dot(d, inv2 * d);
    return 0.5 * (trace(inv2 * g1.sigma) + quad - N + std::log(det2 / det1));
}

template double gwd_distance<2>(const Gaussian2d&, const Gaussian2d&);
template double gwd_distance<3>(const Gaussian3d&, const Gaussian3d&);
template double kld_divergence<2>(const Gaussian2d&, const Gaussian2d&);
template double kld_divergence<3>(const Gaussian3d&, const Gaussian3d&);

const char* to_string(KfLossForm f) {
    switch (f) {
        case KfLossForm::Exp: return "exp";
        case KfLossForm::Linear: return "linear";
        case KfLossForm::NegLog: return "neglog";
        case KfLossForm::ExpRescaled: return "exp_rescaled";
        case KfLossForm::NegLogRescaled: return "neglog_rescaled";
    }
    return "?";
}

const char* to_string(CenterLossForm f) {
    return f == CenterLossForm::SmoothL1 ? "smooth_l1" : "kld_term";
}

const char* to_string(DistTransform f) {
    return f == DistTransform::Sqrt ? "sqrt" : "log1p";
}

const char* to_string(AngleEncoding m) {
    return m == AngleEncoding::Direct ? "direct" : "indirect";
}

const char* to_string(AngleConvention c) {
    return c == AngleConvention::OpenCV ? "opencv" : "long_edge";
}

}  // namespace rbox
