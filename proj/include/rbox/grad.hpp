#pragma once

// Gradient support for the regression loss: forward-mode duals provide the
// analytic gradient, central differences provide the independent check.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "rbox/losses.hpp"

namespace rbox {

struct GradReport {
    std::vector<double> analytic;
    std::vector<double> numeric;
    double max_rel_err = 0.0;
    double step = 0.0;

    bool pass(double tol) const { return std::isfinite(max_rel_err) && max_rel_err < tol; }
};

namespace detail {

inline void check_non_degenerate(double w, double h, double l = 1.0) {
    if (!(w > 1e-3) || !(h > 1e-3) || !(l > 1e-3))
        throw InvalidBoxError("gradient requires extents > 1e-3");
}

}  // namespace detail

/// d regression_loss / d (x, y, w, h, theta) of the predicted box.
inline std::array<double, 5> grad_regression_loss(const RotatedBox2D& pred, const RotatedBox2D& gt,
                                                  const RotatedBox2D& anchor,
                                                  const LossConfig& cfg) {
    validate_box(pred);
    detail::check_non_degenerate(pred.w, pred.h);
    using D = Dual<5>;
    const Box2Params<D> p{D(pred.x, 0), D(pred.y, 1), D(pred.w, 2), D(pred.h, 3),
                          D(pred.theta, 4)};
    const D loss = regression_loss(p, gt, anchor, cfg);
    return loss.d;
}

inline std::array<double, 7> grad_regression_loss(const RotatedBox3D& pred, const RotatedBox3D& gt,
                                                  const RotatedBox3D& anchor,
                                                  const LossConfig& cfg) {
    validate_box(pred);
    detail::check_non_degenerate(pred.w, pred.h, pred.l);
    using D = Dual<7>;
    const Box3Params<D> p{D(pred.x, 0), D(pred.y, 1), D(pred.z, 2), D(pred.w, 3),
                          D(pred.h, 4),  D(pred.l, 5), D(pred.theta, 6)};
    const D loss = regression_loss(p, gt, anchor, cfg);
    return loss.d;
}

inline std::array<double, 5> grad_regression_loss(const RotatedBox2D& pred, const RotatedBox2D& gt,
                                                  const LossConfig& cfg) {
    return grad_regression_loss(pred, gt, gt, cfg);
}

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h. Components whose
/// evaluations come out non-finite are reported as NaN.
inline std::vector<double> finite_difference_grad(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> point,
    double h) {
    std::vector<double> grad(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double saved = point[i];
        point[i] = saved + h;
        const double up = f(point);
        point[i] = saved - h;
        const double down = f(point);
        point[i] = saved;
        grad[i] = (std::isfinite(up) && std::isfinite(down))
                      ? (up - down) / (2.0 * h)
                      : std::numeric_limits<double>::quiet_NaN();
    }
    return grad;
}

/// Dual-number gradient vs central differences on the same loss.
/// Relative error per component is |a - n| / max(1, |a|, |n|).
inline GradReport grad_check(const RotatedBox2D& pred, const RotatedBox2D& gt,
                             const LossConfig& cfg, double h = 1e-5) {
    GradReport rep;
    rep.step = h;
    const auto analytic = grad_regression_loss(pred, gt, gt, cfg);
    rep.analytic.assign(analytic.begin(), analytic.end());
    const auto f = [&](const std::vector<double>& v) {
        const RotatedBox2D b{v[0], v[1], v[2], v[3], v[4], pred.convention};
        return regression_loss(b, gt, gt, cfg);
    };
    rep.numeric = finite_difference_grad(f, {pred.x, pred.y, pred.w, pred.h, pred.theta}, h);
    for (std::size_t i = 0; i < rep.numeric.size(); ++i) {
        const double a = rep.analytic[i];
        const double n = rep.numeric[i];
        const double rel = std::abs(a - n) / std::max({1.0, std::abs(a), std::abs(n)});
        rep.max_rel_err = std::isfinite(rel) ? std::max(rep.max_rel_err, rel)
                                             : std::numeric_limits<double>::infinity();
    }
    return rep;
}

}  // namespace rbox
