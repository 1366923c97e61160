#include "rbox/gaussian.hpp"

#include <cmath>

namespace rbox {

namespace {

constexpr double kIsotropicGap = 1e-9;

void check_spd(double max_asym, double scale, double min_eig) {
    if (max_asym > 1e-9 * std::max(1.0, scale))
        throw DecompositionError("covariance is not symmetric");
    if (!(min_eig > 0.0))
        throw DecompositionError("covariance is not positive definite");
}

}  // namespace

RotatedBox2D gaussian_to_box(const Gaussian2d& g) {
    const SymEigen<2> e = sym_eigen(g.sigma);
    check_spd(max_asymmetry(g.sigma), std::abs(e.values[0]), e.values[1]);
    RotatedBox2D b;
    b.x = g.mu[0];
    b.y = g.mu[1];
    b.w = 2.0 * std::sqrt(e.values[0]);
    b.h = 2.0 * std::sqrt(e.values[1]);
    b.theta = (e.values[0] - e.values[1] < kIsotropicGap)
                  ? 0.0
                  : std::atan2(e.vectors[0][1], e.vectors[0][0]) / kDegToRad;
    b.convention = AngleConvention::LongEdge;
    return canonicalize(b, AngleConvention::LongEdge);
}

RotatedBox3D gaussian_to_box(const Gaussian3d& g) {
    const SymEigen<3> e = sym_eigen(g.sigma);
    check_spd(max_asymmetry(g.sigma), std::abs(e.values[0]), e.values[2]);
    // Rotation is yaw-only, so one eigenvector must be the z axis; it carries l.
    int zi = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(e.vectors[i][2]) > std::abs(e.vectors[zi][2])) zi = i;
    if (std::abs(e.vectors[zi][2]) < 1.0 - 1e-6)
        throw DecompositionError("covariance is not yaw-aligned (no z-axis eigenvector)");
    const int ai = (zi + 1) % 3;
    const int bi = (zi + 2) % 3;
    const int wi = e.values[ai] >= e.values[bi] ? ai : bi;
    const int hi = wi == ai ? bi : ai;
    RotatedBox3D b;
    b.x = g.mu[0];
    b.y = g.mu[1];
    b.z = g.mu[2];
    b.w = 2.0 * std::sqrt(e.values[wi]);
    b.h = 2.0 * std::sqrt(e.values[hi]);
    b.l = 2.0 * std::sqrt(e.values[zi]);
    if (e.values[wi] - e.values[hi] < kIsotropicGap) {
        b.theta = 0.0;
    } else {
        double t = std::atan2(e.vectors[wi][1], e.vectors[wi][0]) / kDegToRad;
        t = std::fmod(t + 90.0, 180.0);
        if (t < 0.0) t += 180.0;
        b.theta = t - 90.0;
    }
    return b;
}

}  // namespace rbox
