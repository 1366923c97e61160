#include <doctest.h>

#include <cmath>

#include "rbox/grad.hpp"
#include "rbox/rng.hpp"

using namespace rbox;

namespace {

RotatedBox2D fuzz_box(CounterRng& rng) {
    return {rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(2, 50),
            rng.uniform(2, 50),   rng.uniform(-90, 90), AngleConvention::LongEdge};
}

}  // namespace

TEST_CASE("dual arithmetic satisfies the chain rule") {
    using D = Dual<2>;
    const D x(3.0, 0);
    const D y(2.0, 1);

    const D prod = x * y;
    CHECK(prod.v == 6.0);
    CHECK(prod.d[0] == 2.0);  // d(xy)/dx = y
    CHECK(prod.d[1] == 3.0);

    const D quot = x / y;
    CHECK(quot.d[0] == doctest::Approx(0.5));
    CHECK(quot.d[1] == doctest::Approx(-0.75));

    const D expr = sqrt(x * x + y * y);
    const double r = std::sqrt(13.0);
    CHECK(expr.v == doctest::Approx(r));
    CHECK(expr.d[0] == doctest::Approx(3.0 / r));
    CHECK(expr.d[1] == doctest::Approx(2.0 / r));

    const D trig = sin(x) * cos(y) + exp(x) * log(y);
    CHECK(trig.d[0] ==
          doctest::Approx(std::cos(3.0) * std::cos(2.0) + std::exp(3.0) * std::log(2.0)));
    CHECK(trig.d[1] == doctest::Approx(-std::sin(3.0) * std::sin(2.0) + std::exp(3.0) / 2.0));

    CHECK(abs(D(-2.0, 0)).d[0] == -1.0);
    CHECK(log1p(D(1.0, 0)).d[0] == doctest::Approx(0.5));
}

TEST_CASE("finite differences on scalar functions") {
    const auto square = [](const std::vector<double>& v) { return v[0] * v[0]; };
    const auto g = finite_difference_grad(square, {3.0}, 1e-5);
    CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-8));

    const auto constant = [](const std::vector<double>&) { return 4.2; };
    const auto gc = finite_difference_grad(constant, {1.0, 2.0, 3.0}, 1e-5);
    for (double v : gc) CHECK(v == 0.0);
}

TEST_CASE("gradient vanishes at the loss minimum") {
    LossConfig cfg;
    cfg.kf_form = KfLossForm::ExpRescaled;
    const RotatedBox2D gt{4, -2, 22, 9, 35, AngleConvention::LongEdge};
    const auto grad = grad_regression_loss(gt, gt, gt, cfg);
    for (double g : grad) CHECK(std::abs(g) <= 1e-9);
}

TEST_CASE("disjoint pairs pull the center toward the target") {
    const LossConfig cfg;
    for (int i = 0; i < 100; ++i) {
        CounterRng rng(111, static_cast<std::uint64_t>(i));
        const RotatedBox2D gt = fuzz_box(rng);
        RotatedBox2D pred = fuzz_box(rng);
        const double gap = 0.5 * (std::hypot(gt.w, gt.h) + std::hypot(pred.w, pred.h));
        const double dir = rng.uniform(0, 6.283185307179586);
        pred.x = gt.x + gap * 1.5 * std::cos(dir);
        pred.y = gt.y + gap * 1.5 * std::sin(dir);
        REQUIRE(skew_iou_2d(pred, gt) == 0.0);
        const auto grad = grad_regression_loss(pred, gt, gt, cfg);
        CHECK((-grad[0]) * (gt.x - pred.x) + (-grad[1]) * (gt.y - pred.y) > 0.0);
    }
}

TEST_CASE("dual gradients match central differences across loss forms") {
    for (KfLossForm form : {KfLossForm::Exp, KfLossForm::Linear, KfLossForm::NegLog,
                            KfLossForm::ExpRescaled, KfLossForm::NegLogRescaled}) {
        for (CenterLossForm center : {CenterLossForm::SmoothL1, CenterLossForm::KldTerm}) {
            LossConfig cfg;
            cfg.kf_form = form;
            cfg.center_form = center;
            const double kink = 1.0 / (cfg.smooth_l1_sigma * cfg.smooth_l1_sigma);
            int checked = 0;
            for (int i = 0; checked < 200; ++i) {
                REQUIRE(i < 2000);
                CounterRng rng(213, static_cast<std::uint64_t>(i));
                const RotatedBox2D gt = fuzz_box(rng);
                RotatedBox2D pred = fuzz_box(rng);
                pred.x = gt.x + rng.uniform(-30, 30);
                pred.y = gt.y + rng.uniform(-30, 30);
                if (center == CenterLossForm::SmoothL1) {
                    const double tx = std::abs((pred.x - gt.x) / gt.w);
                    const double ty = std::abs((pred.y - gt.y) / gt.h);
                    if (std::abs(tx - kink) <= 5e-4 || std::abs(ty - kink) <= 5e-4) continue;
                }
                const GradReport rep = grad_check(pred, gt, cfg);
                CHECK(rep.pass(1e-4));
                ++checked;
            }
        }
    }
}

TEST_CASE("3d gradients match central differences") {
    const LossConfig cfg;
    for (int i = 0; i < 100; ++i) {
        CounterRng rng(313, static_cast<std::uint64_t>(i));
        const RotatedBox3D gt{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20),
                              rng.uniform(2, 40),   rng.uniform(2, 40),   rng.uniform(2, 40),
                              rng.uniform(-90, 90)};
        RotatedBox3D pred = gt;
        pred.x += rng.uniform(-10, 10);
        pred.y += rng.uniform(-10, 10);
        pred.z += rng.uniform(-10, 10);
        pred.w = rng.uniform(2, 40);
        pred.h = rng.uniform(2, 40);
        pred.l = rng.uniform(2, 40);
        pred.theta = rng.uniform(-90, 90);

        const auto analytic = grad_regression_loss(pred, gt, gt, cfg);
        const auto f = [&](const std::vector<double>& v) {
            return regression_loss(RotatedBox3D{v[0], v[1], v[2], v[3], v[4], v[5], v[6]}, gt, gt,
                                   cfg);
        };
        const auto numeric = finite_difference_grad(
            f, {pred.x, pred.y, pred.z, pred.w, pred.h, pred.l, pred.theta}, 1e-5);
        for (std::size_t k = 0; k < numeric.size(); ++k) {
            const double rel = std::abs(analytic[k] - numeric[k]) /
                               std::max({1.0, std::abs(analytic[k]), std::abs(numeric[k])});
            CHECK(rel < 1e-4);
        }
    }
}

TEST_CASE("theta gradient is continuous across the representation boundary") {
    const LossConfig cfg;
    for (int i = 0; i < 100; ++i) {
        CounterRng rng(414, static_cast<std::uint64_t>(i));
        const RotatedBox2D gt = fuzz_box(rng);
        const RotatedBox2D pred = fuzz_box(rng);
        const RotatedBox2D swapped{pred.x, pred.y, pred.h, pred.w, pred.theta + 90.0,
                                   pred.convention};
        const auto g1 = grad_regression_loss(pred, gt, gt, cfg);
        const auto g2 = grad_regression_loss(swapped, gt, gt, cfg);
        CHECK(g1[4] == doctest::Approx(g2[4]).epsilon(1e-7));  // d/dtheta
        CHECK(g1[0] == doctest::Approx(g2[0]).epsilon(1e-7));
        CHECK(g1[1] == doctest::Approx(g2[1]).epsilon(1e-7));
        CHECK(g1[2] == doctest::Approx(g2[3]).epsilon(1e-7));  // w and h swap roles
        CHECK(g1[3] == doctest::Approx(g2[2]).epsilon(1e-7));
    }
}

TEST_CASE("near-square boxes have no angle singularity") {
    const LossConfig cfg;
    const RotatedBox2D gt{0, 0, 10, 10, 0, AngleConvention::LongEdge};
    const RotatedBox2D pred{1, 1, 10 * (1 + 1e-6), 10, 30, AngleConvention::LongEdge};
    const GradReport rep = grad_check(pred, gt, cfg);
    CHECK(rep.pass(1e-4));
}

TEST_CASE("smooth l1 center gradient is bounded by one per component") {
    for (int i = 0; i < 200; ++i) {
        CounterRng rng(515, static_cast<std::uint64_t>(i));
        using D = Dual<2>;
        const D tx(rng.uniform(-4, 4), 0);
        const D ty(rng.uniform(-4, 4), 1);
        EncodedBoxT<D> pred, gt;
        pred.tx = tx;
        pred.ty = ty;
        const D loss = center_loss_smooth_l1(pred, gt, 3.0);
        CHECK(std::abs(loss.d[0]) <= 1.0 + 1e-12);
        CHECK(std::abs(loss.d[1]) <= 1.0 + 1e-12);
    }
}

TEST_CASE("degenerate boxes are rejected") {
    const LossConfig cfg;
    const RotatedBox2D gt{0, 0, 10, 5, 0, AngleConvention::LongEdge};
    CHECK_THROWS_AS(grad_regression_loss(RotatedBox2D{0, 0, 1e-4, 5, 0}, gt, gt, cfg), InvalidBoxError);
}
