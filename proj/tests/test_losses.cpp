#include <doctest.h>

#include <cmath>

#include "rbox/losses.hpp"
#include "rbox/rng.hpp"

using namespace rbox;

namespace {

RotatedBox2D fuzz_box(CounterRng& rng, double lo = 1.0, double hi = 60.0) {
    return {rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(lo, hi),
            rng.uniform(lo, hi),  rng.uniform(-90, 90), AngleConvention::LongEdge};
}

Gaussian2d diag_gaussian(double a, double b) {
    Gaussian2d g;
    g.sigma(0, 0) = a;
    g.sigma(1, 1) = b;
    return g;
}

}  // namespace

TEST_CASE("kfiou spot values and bound") {
    const Gaussian2d g = box2d_to_gaussian({5, 7, 12, 4, -35});
    CHECK(kfiou(g, g) == doctest::Approx(1.0 / 3).epsilon(1e-12));

    CHECK(kfiou(diag_gaussian(4, 1), diag_gaussian(1, 4)) ==
          doctest::Approx(0.25).epsilon(1e-12));

    const Gaussian3d g3 = box3d_to_gaussian({0, 0, 0, 8, 3, 5, 20});
    CHECK(kfiou(g3, g3) == doctest::Approx(1.0 / (std::sqrt(32.0) - 1.0)).epsilon(1e-12));

    CHECK(kfiou_rescaled(g, g) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kfiou_rescaled(g3, g3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kfiou_rescaled(diag_gaussian(4, 1), diag_gaussian(1, 4)) ==
          doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("kfiou is independent of the centers") {
    for (int i = 0; i < 200; ++i) {
        CounterRng rng(41, static_cast<std::uint64_t>(i));
        Gaussian2d g1 = box2d_to_gaussian(fuzz_box(rng));
        Gaussian2d g2 = box2d_to_gaussian(fuzz_box(rng));
        const double base = kfiou(g1, g2);
        g1.mu[0] += rng.uniform(-100, 100);
        g2.mu[1] += rng.uniform(-100, 100);
        CHECK(kfiou(g1, g2) == doctest::Approx(base).epsilon(1e-12));
        CHECK(kfiou(g2, g1) == doctest::Approx(base).epsilon(1e-9));
        CHECK(base <= kfiou_upper_bound(2) + 1e-9);
        CHECK(base > 0.0);
    }
}

TEST_CASE("kf loss forms at spot points") {
    const LossConfig base;
    const RotatedBox2D b{0, 0, 10, 6, 15};

    LossConfig cfg = base;
    cfg.kf_form = KfLossForm::Exp;
    CHECK(kf_loss(b, b, cfg) == doctest::Approx(std::exp(2.0 / 3.0) - 1.0).epsilon(1e-12));

    cfg.kf_form = KfLossForm::ExpRescaled;
    CHECK(kf_loss(b, b, cfg) == doctest::Approx(0.0));

    cfg.kf_form = KfLossForm::Linear;
    CHECK(kf_loss(b, b, cfg) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    cfg.kf_form = KfLossForm::NegLog;
    CHECK(kf_loss(b, b, cfg) ==
          doctest::Approx(-std::log(1.0 / 3.0 + cfg.epsilon)).epsilon(1e-12));

    cfg.kf_form = KfLossForm::NegLogRescaled;
    CHECK(kf_loss(b, b, cfg) == doctest::Approx(-std::log(1.0 + cfg.epsilon)).epsilon(1e-9));

    // perpendicular aspect-2 pair: KFIoU = 0.25, Exp loss = e^0.75 - 1
    cfg.kf_form = KfLossForm::Exp;
    CHECK(kf_loss(RotatedBox2D{0, 0, 4, 2, 0}, RotatedBox2D{0, 0, 4, 2, 90}, cfg) ==
          doctest::Approx(std::exp(0.75) - 1.0).epsilon(1e-12));
}

TEST_CASE("kf loss is monotone decreasing in kfiou") {
    // aspect 4 boxes rotated apart: kfiou strictly decreases with the angle
    const LossConfig cfg;
    for (KfLossForm form : {KfLossForm::Exp, KfLossForm::Linear, KfLossForm::NegLog,
                            KfLossForm::ExpRescaled, KfLossForm::NegLogRescaled}) {
        LossConfig c = cfg;
        c.kf_form = form;
        double prev = -1.0;
        for (int deg = 0; deg <= 90; ++deg) {
            const double loss = kf_loss(RotatedBox2D{0, 0, 40, 10, 0}, RotatedBox2D{0, 0, 40, 10, double(deg)}, c);
            CHECK(loss >= prev - 1e-12);
            prev = loss;
        }
    }
}

TEST_CASE("center losses") {
    EncodedBox a{}, b{};
    CHECK(center_loss_smooth_l1(a, b, 3.0) == 0.0);

    a.tx = 0.5;
    CHECK(center_loss_smooth_l1(a, b, 3.0) == doctest::Approx(0.5 - 0.5 / 9.0).epsilon(1e-12));

    a.tx = 0.01;
    CHECK(center_loss_smooth_l1(a, b, 3.0) == doctest::Approx(0.5 * 9.0 * 1e-4).epsilon(1e-12));

    Vec2d mu1{}, mu2{};
    CHECK(center_loss_kld_term(mu1, mu2, Mat2d::identity()) == 0.0);
    mu2[0] = 1.0;
    CHECK(center_loss_kld_term(mu1, mu2, Mat2d::identity()) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(center_loss_kld_term(mu1, mu2, diag_gaussian(4, 1).sigma) ==
          doctest::Approx(std::log(1.25)).epsilon(1e-12));
}

TEST_CASE("regression loss composition") {
    LossConfig cfg;
    cfg.kf_form = KfLossForm::ExpRescaled;
    const RotatedBox2D gt{10, -4, 18, 6, -25, AngleConvention::LongEdge};
    CHECK(regression_loss(gt, gt, gt, cfg) == doctest::Approx(0.0));

    cfg.kf_form = KfLossForm::Exp;
    CHECK(regression_loss(RotatedBox2D{0, 0, 4, 2, 0}, RotatedBox2D{0, 0, 4, 2, 90},
                          RotatedBox2D{0, 0, 4, 2, 90}, cfg) ==
          doctest::Approx(std::exp(0.75) - 1.0).epsilon(1e-9));

    const RotatedBox2D far{200, 200, 10, 5, 30, AngleConvention::LongEdge};
    const double loss = regression_loss(far, gt, gt, cfg);
    CHECK(std::isfinite(loss));
    CHECK(loss > kf_loss(far, gt, cfg));  // center component strictly positive

    CHECK(weighted_regression_loss(far, gt, gt, cfg) == doctest::Approx(0.01 * loss));
}

TEST_CASE("encode and decode boxes") {
    const RotatedBox2D anchor{2, 3, 8, 4, -20, AngleConvention::LongEdge};
    const EncodedBox zero = encode_box(anchor, anchor, AngleEncoding::Direct);
    CHECK(zero.tx == 0.0);
    CHECK(zero.ty == 0.0);
    CHECK(zero.tw == 0.0);
    CHECK(zero.th == 0.0);
    CHECK(zero.t_theta == 0.0);

    RotatedBox2D doubled = anchor;
    doubled.w = 2 * anchor.w;
    CHECK(encode_box(doubled, anchor, AngleEncoding::Direct).tw ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const EncodedBox ind = encode_box({0, 0, 4, 2, 30}, anchor, AngleEncoding::Indirect);
    CHECK(ind.t_sin == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ind.t_cos == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));

    for (int i = 0; i < 500; ++i) {
        CounterRng rng(51, static_cast<std::uint64_t>(i));
        const RotatedBox2D box = fuzz_box(rng);
        const RotatedBox2D a = fuzz_box(rng);
        for (AngleEncoding mode : {AngleEncoding::Direct, AngleEncoding::Indirect}) {
            const RotatedBox2D back = decode_box(encode_box(box, a, mode), a);
            CHECK(back.x == doctest::Approx(box.x).epsilon(1e-9));
            CHECK(back.y == doctest::Approx(box.y).epsilon(1e-9));
            CHECK(back.w == doctest::Approx(box.w).epsilon(1e-9));
            CHECK(back.h == doctest::Approx(box.h).epsilon(1e-9));
            CHECK(back.theta == doctest::Approx(box.theta).epsilon(1e-9));
        }
    }
}

TEST_CASE("normalize angle pair") {
    const auto [s, c] = normalize_angle_pair(3.0, 4.0);
    CHECK(s == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(c == doctest::Approx(0.8).epsilon(1e-12));

    const auto [s2, c2] = normalize_angle_pair(0.6, 0.8);
    CHECK(s2 == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(c2 == doctest::Approx(0.8).epsilon(1e-12));

    const auto [s3, c3] = normalize_angle_pair(-1.0, 0.0);
    CHECK(s3 == doctest::Approx(-1.0));
    CHECK(std::abs(c3) <= 1e-12);

    CHECK_THROWS(normalize_angle_pair(0.0, 0.0));
}

TEST_CASE("gwd and kld baselines") {
    const Gaussian2d id{Vec2d{}, Mat2d::identity()};
    Gaussian2d moved = id;
    moved.mu[0] = 3.0;

    CHECK(gwd_distance(id, id) == doctest::Approx(0.0));
    CHECK(gwd_distance(id, moved) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(gwd_loss(id, moved, 1.0, DistTransform::Sqrt) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(gwd_loss(id, id, 1.0, DistTransform::Sqrt) == doctest::Approx(0.0));

    const Gaussian2d wide = diag_gaussian(4, 1);
    const double expected_kld = 0.5 * (0.25 + 1.0 - 2.0 + std::log(4.0));
    CHECK(kld_divergence(id, wide) == doctest::Approx(expected_kld).epsilon(1e-12));
    CHECK(kld_divergence(id, id) == doctest::Approx(0.0));
    CHECK(kld_loss(id, id, 1.0, DistTransform::Log1p) == doctest::Approx(0.0));
}

TEST_CASE("scale behavior: kld invariant, gwd not") {
    for (int i = 0; i < 100; ++i) {
        CounterRng rng(61, static_cast<std::uint64_t>(i));
        const RotatedBox2D a = fuzz_box(rng);
        const RotatedBox2D b = fuzz_box(rng);
        const double s = rng.uniform(1.5, 10.0);
        auto scaled = [&](const RotatedBox2D& o) {
            return RotatedBox2D{s * o.x, s * o.y, s * o.w, s * o.h, o.theta, o.convention};
        };
        const Gaussian2d g1 = box2d_to_gaussian(a), g2 = box2d_to_gaussian(b);
        const Gaussian2d h1 = box2d_to_gaussian(scaled(a)), h2 = box2d_to_gaussian(scaled(b));
        CHECK(kfiou(h1, h2) == doctest::Approx(kfiou(g1, g2)).epsilon(1e-9));
        CHECK(kfiou_rescaled(h1, h2) == doctest::Approx(kfiou_rescaled(g1, g2)).epsilon(1e-9));
        CHECK(kld_divergence(h1, h2) == doctest::Approx(kld_divergence(g1, g2)).epsilon(1e-9));
        CHECK(gwd_distance(h1, h2) ==
              doctest::Approx(s * s * gwd_distance(g1, g2)).epsilon(1e-9));
    }
}

TEST_CASE("boundary continuity of kf loss") {
    const LossConfig cfg;
    for (int i = 0; i < 200; ++i) {
        CounterRng rng(71, static_cast<std::uint64_t>(i));
        const RotatedBox2D a = fuzz_box(rng);
        const RotatedBox2D b = fuzz_box(rng);
        const RotatedBox2D a_swapped{a.x, a.y, a.h, a.w, a.theta - 90.0, a.convention};
        CHECK(kf_loss(a, b, cfg) == doctest::Approx(kf_loss(a_swapped, b, cfg)).epsilon(1e-9));
    }
}

TEST_CASE("smooth l1 box loss properties") {
    const RotatedBox2D anchor{0, 0, 10, 5, 0, AngleConvention::LongEdge};
    const EncodedBox e = encode_box(anchor, anchor, AngleEncoding::Direct);
    CHECK(smooth_l1_box_loss(e, e, 3.0) == 0.0);

    // fixed angle offset: the loss does not see the aspect ratio
    double first = -1.0;
    for (double aspect = 1.0; aspect <= 8.0; aspect += 0.5) {
        const double h = std::sqrt(400.0 / aspect);
        const RotatedBox2D gt{0, 0, aspect * h, h, 0, AngleConvention::LongEdge};
        const RotatedBox2D pred{0, 0, aspect * h, h, 30, AngleConvention::LongEdge};
        const double loss = smooth_l1_box_loss(encode_box(pred, gt, AngleEncoding::Direct),
                                               encode_box(gt, gt, AngleEncoding::Direct), 3.0);
        if (first < 0)
            first = loss;
        else
            CHECK(loss == doctest::Approx(first).epsilon(1e-12));
    }

    // theta-only deviations do not depend on the extents
    const double l1 = smooth_l1_box_loss(
        encode_box({0, 0, 30, 10, 20}, {0, 0, 30, 10, 0}, AngleEncoding::Direct),
        encode_box({0, 0, 30, 10, 0}, {0, 0, 30, 10, 0}, AngleEncoding::Direct), 3.0);
    const double l2 = smooth_l1_box_loss(
        encode_box({0, 0, 6, 2, 20}, {0, 0, 6, 2, 0}, AngleEncoding::Direct),
        encode_box({0, 0, 6, 2, 0}, {0, 0, 6, 2, 0}, AngleEncoding::Direct), 3.0);
    CHECK(l1 == doctest::Approx(l2).epsilon(1e-12));
}

TEST_CASE("kfiou bound fuzz across 2d and 3d") {
    for (int i = 0; i < 20000; ++i) {
        CounterRng rng(81, static_cast<std::uint64_t>(i));
        const RotatedBox2D a = fuzz_box(rng);
        const RotatedBox2D b = fuzz_box(rng);
        CHECK(kfiou(a, b) <= kfiou_upper_bound(2) + 1e-9);
        const RotatedBox3D a3{0, 0, 0, rng.uniform(1, 60), rng.uniform(1, 60),
                              rng.uniform(1, 60), rng.uniform(-90, 90)};
        const RotatedBox3D b3{0, 0, 0, rng.uniform(1, 60), rng.uniform(1, 60),
                              rng.uniform(1, 60), rng.uniform(-90, 90)};
        CHECK(kfiou(a3, b3) <= kfiou_upper_bound(3) + 1e-9);
    }
}
