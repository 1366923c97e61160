#include "rbox/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "rbox/config_io.hpp"
#include "rbox/grad.hpp"
#include "rbox/rng.hpp"
#include "rbox/sim.hpp"

namespace rbox {

namespace {

constexpr std::size_t kMaxMessages = 4;

struct SuiteRun {
    SuiteResult result;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit SuiteRun(std::string name) { result.name = std::move(name); }

    void check(bool ok, const std::function<std::string()>& describe) {
        ++result.checks;
        if (!ok) {
            ++result.failures;
            if (result.failure_messages.size() < kMaxMessages)
                result.failure_messages.push_back(describe());
        }
    }

    void check(bool ok, const std::string& message) {
        check(ok, [&] { return message; });
    }

    SuiteResult finish() {
        result.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return result;
    }
};

RotatedBox2D random_box(CounterRng& rng, double ext_min, double ext_max) {
    RotatedBox2D b;
    b.x = rng.uniform(-50.0, 50.0);
    b.y = rng.uniform(-50.0, 50.0);
    b.w = rng.uniform(ext_min, ext_max);
    b.h = rng.uniform(ext_min, ext_max);
    b.theta = rng.uniform(-90.0, 90.0);
    b.convention = AngleConvention::LongEdge;
    return b;
}

std::string pair_repr(const RotatedBox2D& a, const RotatedBox2D& b) {
    return "boxes " + box_to_string(a) + " vs " + box_to_string(b);
}

/// Shrink a failing pair by snapping fields to integers while it still fails.
std::pair<RotatedBox2D, RotatedBox2D> minimize_pair(
    RotatedBox2D a, RotatedBox2D b,
    const std::function<bool(const RotatedBox2D&, const RotatedBox2D&)>& fails) {
    auto snap_fields = [&](RotatedBox2D& box) {
        for (double* f : {&box.x, &box.y, &box.w, &box.h, &box.theta}) {
            const double saved = *f;
            *f = std::round(saved);
            if ((f == &box.w || f == &box.h) && *f <= 0.0) *f = 1.0;
            if (!fails(a, b)) *f = saved;
        }
    };
    snap_fields(a);
    snap_fields(b);
    return {a, b};
}

SuiteResult suite_appendix_a_bound() {
    SuiteRun run("appendix-a-bound");
    for (int i = 0; i < 100000; ++i) {
        CounterRng rng(2024, static_cast<std::uint64_t>(i) + 1);
        const RotatedBox2D a = random_box(rng, 1.0, 100.0);
        const RotatedBox2D b = random_box(rng, 1.0, 100.0);
        const double k = kfiou(a, b);
        run.check(k <= kfiou_upper_bound(2) + 1e-9,
                  [&] { return "2-D bound exceeded: kfiou=" + format_double(k) + " for " +
                               pair_repr(a, b); });
    }
    for (int i = 0; i < 100000; ++i) {
        CounterRng rng(4048, static_cast<std::uint64_t>(i) + 1);
        RotatedBox3D a{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50),
                       rng.uniform(1, 100),  rng.uniform(1, 100),  rng.uniform(1, 100),
                       rng.uniform(-90, 90)};
        RotatedBox3D b{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50),
                       rng.uniform(1, 100),  rng.uniform(1, 100),  rng.uniform(1, 100),
                       rng.uniform(-90, 90)};
        const double k = kfiou(a, b);
        run.check(k <= kfiou_upper_bound(3) + 1e-9,
                  [&] { return "3-D bound exceeded: kfiou=" + format_double(k); });
    }
    for (int i = 0; i < 1000; ++i) {
        CounterRng rng(77, static_cast<std::uint64_t>(i));
        const RotatedBox2D a = random_box(rng, 1.0, 100.0);
        run.check(std::abs(kfiou(a, a) - kfiou_upper_bound(2)) <= 1e-9,
                  [&] { return "2-D equality case off bound for " + box_to_string(a); });
        const RotatedBox3D c{0, 0, 0, rng.uniform(1, 100), rng.uniform(1, 100),
                             rng.uniform(1, 100), rng.uniform(-90, 90)};
        run.check(std::abs(kfiou(c, c) - kfiou_upper_bound(3)) <= 1e-9,
                  "3-D equality case off bound");
    }
    return run.finish();
}

SuiteResult suite_closed_form_values() {
    SuiteRun run("closed-form-values");
    const RotatedBox2D same{10.0, 5.0, 30.0, 10.0, 25.0, AngleConvention::LongEdge};
    run.check(std::abs(kfiou(same, same) - 1.0 / 3.0) <= 1e-12, "identical 2-D KFIoU != 1/3");

    const RotatedBox2D wide{0, 0, 4, 2, 0, AngleConvention::LongEdge};
    const RotatedBox2D tall{0, 0, 2, 4, 0, AngleConvention::LongEdge};
    run.check(std::abs(kfiou(wide, tall) - 0.25) <= 1e-12, "diag(4,1)/diag(1,4) KFIoU != 0.25");
    run.check(std::abs(skew_iou_2d(wide, tall) - 1.0 / 3.0) <= 1e-9,
              "diag(4,1)/diag(1,4) exact SkewIoU != 1/3");

    const RotatedBox2D sq{0, 0, 2, 2, 0, AngleConvention::LongEdge};
    const RotatedBox2D sq45{0, 0, 2, 2, 45, AngleConvention::LongEdge};
    const double expected = 8.0 * (std::sqrt(2.0) - 1.0) / (8.0 - 8.0 * (std::sqrt(2.0) - 1.0));
    const double exact = skew_iou_2d(sq, sq45);
    run.check(std::abs(exact - expected) <= 1e-9,
              "45-degree square pair exact SkewIoU " + format_double(exact));
    const double raster = rasterized_iou(sq, sq45, 2000);
    run.check(std::abs(exact - raster) <= 5e-3,
              "45-degree square pair raster cross-check " + format_double(raster));
    return run.finish();
}

SuiteResult suite_oracle_agreement() {
    SuiteRun run("oracle-agreement");
    for (int i = 0; i < 1000; ++i) {
        CounterRng rng(555, static_cast<std::uint64_t>(i));
        RotatedBox2D a = random_box(rng, 2.0, 50.0);
        RotatedBox2D b = random_box(rng, 2.0, 50.0);
        b.x = a.x + rng.uniform(-40.0, 40.0);
        b.y = a.y + rng.uniform(-40.0, 40.0);
        const double exact = skew_iou_2d(a, b);
        const double raster = rasterized_iou(a, b, 1000);
        if (std::abs(exact - raster) > 5e-3) {
            auto fails = [](const RotatedBox2D& x, const RotatedBox2D& y) {
                return std::abs(skew_iou_2d(x, y) - rasterized_iou(x, y, 1000)) > 5e-3;
            };
            const auto [ma, mb] = minimize_pair(a, b, fails);
            run.check(false, "oracle disagreement " + format_double(exact) + " vs " +
                                 format_double(raster) + " at " + pair_repr(ma, mb));
        } else {
            run.check(true, "");
        }
    }
    return run.finish();
}

SuiteResult suite_evar_ordering() {
    SuiteRun run("evar-ordering");
    const LossConfig cfg;
    const std::vector<SimMethod> order = {SimMethod::KFIoUKldCenter, SimMethod::KFIoU,
                                          SimMethod::KLD, SimMethod::GWD, SimMethod::SmoothL1};
    int ok_seeds = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        PairProtocol p;
        p.seed = seed;
        std::vector<double> evars;
        evars.reserve(order.size());
        for (SimMethod m : order) evars.push_back(emean_evar(p, m, cfg).evar);
        bool sorted = true;
        for (std::size_t i = 0; i + 1 < evars.size(); ++i)
            if (!(evars[i] < evars[i + 1])) sorted = false;
        if (sorted) ++ok_seeds;
        if (seed == 1) {
            std::string line = "seed 1 EVar:";
            for (std::size_t i = 0; i < order.size(); ++i)
                line += " " + std::string(to_string(order[i])) + "=" + format_double(evars[i]);
            run.result.notes.push_back(line);
        }
    }
    run.check(ok_seeds >= 9, "EVar ordering held for only " + std::to_string(ok_seeds) +
                                 "/10 seeds (need >= 9)");
    return run.finish();
}

SuiteResult suite_sweep_trends() {
    SuiteRun run("sweep-trends");
    const LossConfig cfg;
    const auto methods = all_sim_methods();
    const SweepTable angle = angle_sweep(4.0, 0.0, 0.0, 90.0, 1.0, methods, cfg);
    for (std::size_t m = 0; m < angle.methods.size(); ++m) {
        for (std::size_t r = 0; r + 1 < angle.x.size(); ++r) {
            run.check(angle.values[r + 1][m] >= angle.values[r][m] - 1e-12,
                      [&] {
                          return "angle sweep not monotone for " + angle.methods[m] + " at " +
                                 format_double(angle.x[r]) + " deg";
                      });
        }
    }
    const SweepTable aspect = aspect_sweep(30.0, 1.0, 8.0, 0.25, methods, cfg);
    auto column = [&](SimMethod wanted) {
        std::vector<double> col;
        for (std::size_t r = 0; r < aspect.x.size(); ++r)
            for (std::size_t m = 0; m < aspect.methods.size(); ++m)
                if (aspect.methods[m] == to_string(wanted)) col.push_back(aspect.values[r][m]);
        return col;
    };
    const std::vector<double> sl1 = column(SimMethod::SmoothL1);
    for (std::size_t r = 1; r < sl1.size(); ++r)
        run.check(std::abs(sl1[r] - sl1[0]) <= 1e-9, "smooth-l1 aspect column not constant");
    for (SimMethod m : {SimMethod::KFIoU, SimMethod::PlainSkewIoU}) {
        const std::vector<double> col = column(m);
        double lo = col[0], hi = col[0];
        for (double v : col) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        run.check(hi - lo > 0.10 * std::max(hi, 1e-12),
                  std::string(to_string(m)) + " aspect column varies < 10%");
    }
    return run.finish();
}

SuiteResult suite_deviation_scale_trends() {
    SuiteRun run("deviation-scale-trends");
    const LossConfig cfg;
    PairProtocol proto;
    proto.seed = 7;
    std::vector<double> devs;
    for (int d = 0; d <= 9; ++d) devs.push_back(d);
    const SweepTable dev_table =
        deviation_sweep(proto, devs, {SimMethod::KFIoU, SimMethod::GWD}, cfg);
    for (std::size_t r = 0; r < dev_table.x.size(); ++r) {
        run.check(dev_table.values[r][0] <= dev_table.values[r][1],
                  [&] {
                      return "KFIoU EVar " + format_double(dev_table.values[r][0]) +
                             " above GWD " + format_double(dev_table.values[r][1]) + " at dev " +
                             format_double(dev_table.x[r]);
                  });
    }

    // Joint scaling: the (seed, index) pair at scale s is exactly s times the
    // scale-1 pair, so per-pair KFIoU similarity must not drift at all while
    // the GWD distance grows with the square of the scale.
    PairProtocol joint = proto;
    joint.scale_deviation = true;
    for (int i = 0; i < 200; ++i) {
        joint.scale = 1.0;
        const auto [a1, b1] = sample_pair(joint, i);
        joint.scale = 10.0;
        const auto [a10, b10] = sample_pair(joint, i);
        const double sim1 = method_similarity(a1, b1, SimMethod::KFIoU, cfg);
        const double sim10 = method_similarity(a10, b10, SimMethod::KFIoU, cfg);
        run.check(std::abs(sim1 - sim10) <= 1e-9,
                  [&] {
                      return "KFIoU similarity drifted under joint scaling: " +
                             format_double(sim1) + " vs " + format_double(sim10) + " for " +
                             pair_repr(a1, b1);
                  });
        const double d1 = gwd_distance(box2d_to_gaussian(a1), box2d_to_gaussian(b1));
        const double d10 = gwd_distance(box2d_to_gaussian(a10), box2d_to_gaussian(b10));
        run.check(d1 > 1e-12 && d10 / d1 > 2.0,
                  [&] {
                      return "GWD distance did not scale: " + format_double(d1) + " -> " +
                             format_double(d10);
                  });
    }
    return run.finish();
}

LossConfig config_for(KfLossForm kf, CenterLossForm center) {
    LossConfig cfg;
    cfg.kf_form = kf;
    cfg.center_form = center;
    return cfg;
}

SuiteResult suite_grad_check() {
    SuiteRun run("grad-check");
    const KfLossForm forms[] = {KfLossForm::Exp, KfLossForm::Linear, KfLossForm::NegLog,
                                KfLossForm::ExpRescaled, KfLossForm::NegLogRescaled};
    const CenterLossForm centers[] = {CenterLossForm::SmoothL1, CenterLossForm::KldTerm};
    std::uint64_t stream = 0;
    for (KfLossForm kf : forms) {
        for (CenterLossForm center : centers) {
            const LossConfig cfg = config_for(kf, center);
            const double kink = 1.0 / (cfg.smooth_l1_sigma * cfg.smooth_l1_sigma);
            for (int i = 0; i < 1000; ++i) {
                CounterRng rng(9000 + stream, static_cast<std::uint64_t>(i));
                RotatedBox2D gt, pred;
                // Central differences are ill-posed exactly at the smooth-L1
                // transition (the loss is only C^1 there), so keep the center
                // offsets off that measure-zero set.
                for (int attempt = 0; attempt < 64; ++attempt) {
                    gt = random_box(rng, 2.0, 50.0);
                    pred = random_box(rng, 2.0, 50.0);
                    pred.x = gt.x + rng.uniform(-30.0, 30.0);
                    pred.y = gt.y + rng.uniform(-30.0, 30.0);
                    if (center != CenterLossForm::SmoothL1) break;
                    const double tx = std::abs((pred.x - gt.x) / gt.w);
                    const double ty = std::abs((pred.y - gt.y) / gt.h);
                    if (std::abs(tx - kink) > 5e-4 && std::abs(ty - kink) > 5e-4) break;
                }
                const GradReport rep = grad_check(pred, gt, cfg);
                run.check(rep.pass(1e-4),
                          [&] {
                              return std::string("grad mismatch rel_err=") +
                                     format_double(rep.max_rel_err) + " form=" + to_string(kf) +
                                     "/" + to_string(center) + " " + pair_repr(pred, gt);
                          });
            }
            ++stream;
        }
    }
    // Boundary continuity: the swapped representation of the same point set
    // must give the same loss value.
    const LossConfig cfg;
    for (int i = 0; i < 200; ++i) {
        CounterRng rng(31337, static_cast<std::uint64_t>(i));
        const RotatedBox2D gt = random_box(rng, 2.0, 50.0);
        const RotatedBox2D pred = random_box(rng, 2.0, 50.0);
        const RotatedBox2D swapped{pred.x, pred.y, pred.h, pred.w, pred.theta + 90.0,
                                   pred.convention};
        run.check(std::abs(regression_loss(pred, gt, gt, cfg) -
                           regression_loss(swapped, gt, gt, cfg)) <= 1e-9,
                  [&] { return "regression loss jumps at representation boundary for " +
                               pair_repr(pred, gt); });
        run.check(std::abs(kf_loss(pred, gt, cfg) - kf_loss(swapped, gt, cfg)) <= 1e-9,
                  "kf loss jumps at representation boundary");
    }
    return run.finish();
}

SuiteResult suite_non_overlap() {
    SuiteRun run("non-overlap");
    for (CenterLossForm center : {CenterLossForm::SmoothL1, CenterLossForm::KldTerm}) {
        const LossConfig cfg = config_for(KfLossForm::Exp, center);
        for (int i = 0; i < 100; ++i) {
            CounterRng rng(606 + (center == CenterLossForm::KldTerm ? 1 : 0),
                           static_cast<std::uint64_t>(i));
            const RotatedBox2D gt = random_box(rng, 2.0, 50.0);
            RotatedBox2D pred = random_box(rng, 2.0, 50.0);
            const double gap = 0.5 * (std::hypot(gt.w, gt.h) + std::hypot(pred.w, pred.h));
            const double dir = rng.uniform(0.0, 6.283185307179586);
            const double dist = gap * (1.1 + rng.next_double());
            pred.x = gt.x + dist * std::cos(dir);
            pred.y = gt.y + dist * std::sin(dir);
            run.check(skew_iou_2d(pred, gt) == 0.0, "pair is not disjoint");
            const double loss = regression_loss(pred, gt, gt, cfg);
            run.check(std::isfinite(loss) && loss > 0.0, "loss not finite/positive when disjoint");
            const auto grad = grad_regression_loss(pred, gt, gt, cfg);
            const double toward_x = gt.x - pred.x;
            const double toward_y = gt.y - pred.y;
            run.check(-grad[0] * toward_x - grad[1] * toward_y > 0.0,
                      [&] { return "descent direction points away from target for " +
                                   pair_repr(pred, gt); });
        }
    }
    return run.finish();
}

SuiteResult suite_encode_roundtrip() {
    SuiteRun run("encode-roundtrip");
    for (AngleEncoding mode : {AngleEncoding::Direct, AngleEncoding::Indirect}) {
        for (int i = 0; i < 10000; ++i) {
            CounterRng rng(808 + (mode == AngleEncoding::Indirect ? 1 : 0),
                           static_cast<std::uint64_t>(i));
            const RotatedBox2D box = random_box(rng, 2.0, 100.0);
            const RotatedBox2D anchor = random_box(rng, 2.0, 100.0);
            const RotatedBox2D back = decode_box(encode_box(box, anchor, mode), anchor);
            const double err = std::max({std::abs(back.x - box.x), std::abs(back.y - box.y),
                                         std::abs(back.w - box.w), std::abs(back.h - box.h),
                                         std::abs(back.theta - box.theta)});
            run.check(err <= 1e-9,
                      [&] { return "round-trip error " + format_double(err) + " for box " +
                                   box_to_string(box); });
        }
    }
    for (int i = 0; i < 1000; ++i) {
        CounterRng rng(909, static_cast<std::uint64_t>(i));
        const double s = rng.uniform(-3.0, 3.0);
        const double c = rng.uniform(-3.0, 3.0);
        if (s * s + c * c < 1e-6) continue;
        const auto [ns, nc] = normalize_angle_pair(s, c);
        run.check(std::abs(ns * ns + nc * nc - 1.0) <= 1e-9, "normalized pair off unit circle");
    }
    return run.finish();
}

SuiteResult suite_determinism() {
    SuiteRun run("determinism");
    const LossConfig cfg;
    PairProtocol p;
    p.seed = 42;
    p.n_samples = 500;
    const std::string base = sim_report_csv(emean_evar(p, SimMethod::KFIoU, cfg, 1), cfg);
    for (int threads : {1, 2, 4}) {
        const std::string again = sim_report_csv(emean_evar(p, SimMethod::KFIoU, cfg, threads), cfg);
        run.check(again == base,
                  "CSV differs for thread count " + std::to_string(threads));
    }
    return run.finish();
}

}  // namespace

std::vector<std::string> selftest_suite_names() {
    return {"appendix-a-bound", "closed-form-values",     "oracle-agreement",
            "evar-ordering",    "sweep-trends",           "deviation-scale-trends",
            "grad-check",       "non-overlap",            "encode-roundtrip",
            "determinism"};
}

SuiteResult run_selftest_suite(const std::string& name) {
    if (name == "appendix-a-bound") return suite_appendix_a_bound();
    if (name == "closed-form-values") return suite_closed_form_values();
    if (name == "oracle-agreement") return suite_oracle_agreement();
    if (name == "evar-ordering") return suite_evar_ordering();
    if (name == "sweep-trends") return suite_sweep_trends();
    if (name == "deviation-scale-trends") return suite_deviation_scale_trends();
    if (name == "grad-check") return suite_grad_check();
    if (name == "non-overlap") return suite_non_overlap();
    if (name == "encode-roundtrip") return suite_encode_roundtrip();
    if (name == "determinism") return suite_determinism();
    throw std::invalid_argument("unknown selftest suite '" + name + "'");
}

std::vector<SuiteResult> run_selftest() {
    std::vector<SuiteResult> out;
    for (const std::string& name : selftest_suite_names()) out.push_back(run_selftest_suite(name));
    return out;
}

}  // namespace rbox
