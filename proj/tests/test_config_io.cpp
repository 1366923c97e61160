#include <doctest.h>

#include "rbox/config_io.hpp"

using namespace rbox;

TEST_CASE("box wire format") {
    const RotatedBox2D b = parse_box2d("1.5,-2,4,2,30");
    CHECK(b.x == 1.5);
    CHECK(b.y == -2.0);
    CHECK(b.w == 4.0);
    CHECK(b.h == 2.0);
    CHECK(b.theta == 30.0);

    const RotatedBox3D c = parse_box3d("0,1,2,4,2,6,90");
    CHECK(c.z == 2.0);
    CHECK(c.l == 6.0);

    CHECK_THROWS_WITH_AS(parse_box2d("1,2,3,4"), doctest::Contains("5 fields"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_box2d("1,2,oops,4,5"), doctest::Contains("field w"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_box2d("1,2,-3,4,5"), InvalidBoxError);

    const RotatedBox2D round = parse_box2d(box_to_string(b));
    CHECK(round.x == b.x);
    CHECK(round.theta == b.theta);
}

TEST_CASE("loss config parse and serialize") {
    LossConfig cfg;
    cfg.kf_form = KfLossForm::NegLogRescaled;
    cfg.center_form = CenterLossForm::KldTerm;
    cfg.epsilon = 1e-5;
    cfg.lambda1 = 0.02;
    cfg.gwd_tau = 2.0;
    cfg.kld_f = DistTransform::Sqrt;
    cfg.rescale = false;

    const LossConfig back = parse_loss_config(serialize_loss_config(cfg));
    CHECK(back.kf_form == cfg.kf_form);
    CHECK(back.center_form == cfg.center_form);
    CHECK(back.epsilon == cfg.epsilon);
    CHECK(back.lambda1 == cfg.lambda1);
    CHECK(back.gwd_tau == cfg.gwd_tau);
    CHECK(back.kld_f == cfg.kld_f);
    CHECK(back.rescale == cfg.rescale);

    const LossConfig defaults = parse_loss_config("");
    CHECK(defaults.kf_form == KfLossForm::Exp);
    CHECK(defaults.lambda1 == 0.01);
    CHECK(defaults.gwd_tau == 1.0);
    CHECK(defaults.gwd_f == DistTransform::Sqrt);
    CHECK(defaults.kld_f == DistTransform::Log1p);

    const LossConfig partial = parse_loss_config("# comment\nkf_form = linear\n\ngwd_tau = 3\n");
    CHECK(partial.kf_form == KfLossForm::Linear);
    CHECK(partial.gwd_tau == 3.0);

    CHECK_THROWS_WITH_AS(parse_loss_config("nope = 1\n"), doctest::Contains("unknown config key"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_loss_config("epsilon = -1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_loss_config("gwd_tau = 0.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_loss_config("kf_form exp\n"), std::invalid_argument);
}
