// Command-line front end: exact/approximate IoU queries, Gaussian
// conversions, loss evaluation, EMean/EVar simulation, sweeps, a micro
// benchmark and the acceptance selftest.
//
// Exit codes: 0 success, 1 assertion/selftest failure, 2 usage error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbox/config_io.hpp"
#include "rbox/grad.hpp"
#include "rbox/rng.hpp"
#include "rbox/selftest.hpp"
#include "rbox/sim.hpp"

namespace {

using namespace rbox;

struct ConfigFlags {
    std::string config_path;
    std::string kf_form, center_form, gwd_f, kld_f;
    std::optional<double> epsilon, sigma, gwd_tau, kld_tau, lambda1;
    std::optional<bool> rescale;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "loss config file (key = value lines)");
        cmd->add_option("--kf-form", kf_form,
                        "exp|linear|neglog|exp_rescaled|neglog_rescaled");
        cmd->add_option("--center-form", center_form, "smooth_l1|kld_term");
        cmd->add_option("--epsilon", epsilon, "log-form guard");
        cmd->add_option("--sigma", sigma, "smooth-L1 transition parameter");
        cmd->add_option("--gwd-tau", gwd_tau);
        cmd->add_option("--gwd-f", gwd_f, "sqrt|log1p");
        cmd->add_option("--kld-tau", kld_tau);
        cmd->add_option("--kld-f", kld_f, "sqrt|log1p");
        cmd->add_option("--lambda1", lambda1, "regression weight");
        cmd->add_flag("--rescale,!--no-rescale", rescale,
                      "stretch KFIoU by its upper bound in similarity mappings");
    }

    LossConfig resolve() const {
        LossConfig cfg = config_path.empty() ? LossConfig{} : load_loss_config(config_path);
        std::string text;
        if (!kf_form.empty()) text += "kf_form = " + kf_form + "\n";
        if (!center_form.empty()) text += "center_form = " + center_form + "\n";
        if (!gwd_f.empty()) text += "gwd_f = " + gwd_f + "\n";
        if (!kld_f.empty()) text += "kld_f = " + kld_f + "\n";
        const LossConfig parsed = parse_loss_config(text);
        if (!kf_form.empty()) cfg.kf_form = parsed.kf_form;
        if (!center_form.empty()) cfg.center_form = parsed.center_form;
        if (!gwd_f.empty()) cfg.gwd_f = parsed.gwd_f;
        if (!kld_f.empty()) cfg.kld_f = parsed.kld_f;
        if (epsilon) cfg.epsilon = *epsilon;
        if (sigma) cfg.smooth_l1_sigma = *sigma;
        if (gwd_tau) cfg.gwd_tau = *gwd_tau;
        if (kld_tau) cfg.kld_tau = *kld_tau;
        if (lambda1) cfg.lambda1 = *lambda1;
        if (rescale) cfg.rescale = *rescale;
        return cfg;
    }
};

struct ProtocolFlags {
    PairProtocol proto;
    std::pair<double, double> extent{4.0, 50.0};
    std::pair<double, double> aspect{1.0, 8.0};
    std::pair<double, double> angle{-90.0, 90.0};

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", proto.seed, "RNG seed");
        cmd->add_option("--n", proto.n_samples, "sample count")->check(CLI::PositiveNumber);
        cmd->add_option("--max-dev", proto.max_center_dev, "max center deviation (px)");
        cmd->add_option("--scale", proto.scale, "global scale multiplier");
        cmd->add_option("--extent-range", extent, "short-side range (px)");
        cmd->add_option("--aspect-range", aspect, "aspect-ratio range");
        cmd->add_option("--angle-range", angle, "angle range of the reference box (deg)");
        cmd->add_option("--angle-jitter", proto.max_angle_jitter,
                        "max angle perturbation of the second box (deg)");
        cmd->add_option("--extent-jitter", proto.extent_jitter,
                        "log-scale extent perturbation bound of the second box");
        cmd->add_flag("--independent-shapes", proto.independent_shapes,
                      "draw the second box's extents independently");
        cmd->add_flag("--scale-dev", proto.scale_deviation,
                      "scale the center deviation together with the boxes");
    }

    PairProtocol resolve() const {
        PairProtocol p = proto;
        p.extent_min = extent.first;
        p.extent_max = extent.second;
        p.aspect_min = aspect.first;
        p.aspect_max = aspect.second;
        p.angle_min = angle.first;
        p.angle_max = angle.second;
        return p;
    }
};

std::vector<SimMethod> parse_methods(const std::string& csv) {
    if (csv.empty()) return all_sim_methods();
    std::vector<SimMethod> out;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(sim_method_from_string(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw std::invalid_argument("no methods given");
    return out;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fputs(content.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

struct RangeSpec {
    double lo = 0.0, hi = 0.0, step = 1.0;
};

RangeSpec parse_range(const std::string& text) {
    RangeSpec r;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &r.lo, &r.hi, &r.step) != 3 || r.step <= 0 ||
        r.hi < r.lo)
        throw std::invalid_argument("range must be lo:hi:step with step > 0, got '" + text + "'");
    return r;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw std::invalid_argument("expected a comma-separated list of numbers");
    return out;
}

// Pairs from a file: one pair per line, two whitespace-separated box tuples.
// The whole file is parsed before anything is printed.
std::vector<std::pair<std::string, std::string>> read_pair_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream row(line);
        std::string a, b, extra;
        if (!(row >> a)) continue;  // blank line
        if (!(row >> b) || (row >> extra))
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": expected exactly two boxes");
        pairs.emplace_back(a, b);
    }
    return pairs;
}

int cmd_iou(const std::vector<std::string>& boxes, bool three_d, const std::string& mode,
            bool all, int grid) {
    if (three_d) {
        const RotatedBox3D a = parse_box3d(boxes[0]);
        const RotatedBox3D b = parse_box3d(boxes[1]);
        if (all) {
            std::printf("exact %.6f\n", skew_iou_3d(a, b));
            std::printf("kfiou %.6f\n", kfiou(a, b));
            std::printf("rescaled %.6f\n", kfiou_rescale_factor(3) * kfiou(a, b));
        } else if (mode == "exact") {
            std::printf("%.6f\n", skew_iou_3d(a, b));
        } else if (mode == "kfiou") {
            std::printf("%.6f\n", kfiou(a, b));
        } else {
            throw std::invalid_argument("raster mode is 2-D only");
        }
        return 0;
    }
    const RotatedBox2D a = parse_box2d(boxes[0]);
    const RotatedBox2D b = parse_box2d(boxes[1]);
    if (all) {
        std::printf("exact %.6f\n", skew_iou_2d(a, b));
        std::printf("kfiou %.6f\n", kfiou(a, b));
        std::printf("rescaled %.6f\n", kfiou_rescale_factor(2) * kfiou(a, b));
        return 0;
    }
    if (mode == "exact")
        std::printf("%.6f\n", skew_iou_2d(a, b));
    else if (mode == "kfiou")
        std::printf("%.6f\n", kfiou(a, b));
    else if (mode == "raster")
        std::printf("%.6f\n", rasterized_iou(a, b, grid));
    else
        throw std::invalid_argument("unknown mode '" + mode + "'");
    return 0;
}

void print_matrix2(const Mat2d& m) {
    std::printf("sigma  %s %s\n", format_double(m(0, 0)).c_str(), format_double(m(0, 1)).c_str());
    std::printf("       %s %s\n", format_double(m(1, 0)).c_str(), format_double(m(1, 1)).c_str());
}

int cmd_gauss(const std::vector<std::string>& boxes) {
    const Gaussian2d g1 = box2d_to_gaussian(parse_box2d(boxes[0]));
    std::printf("mu     %s %s\n", format_double(g1.mu[0]).c_str(),
                format_double(g1.mu[1]).c_str());
    print_matrix2(g1.sigma);
    std::printf("volume %s\n", format_double(gaussian_volume<double, 2>(g1.sigma)).c_str());
    if (boxes.size() == 2) {
        const Gaussian2d g2 = box2d_to_gaussian(parse_box2d(boxes[1]));
        const auto prod = gaussian_product(g1, g2);
        std::printf("-- product --\n");
        std::printf("mu     %s %s\n", format_double(prod.fused.mu[0]).c_str(),
                    format_double(prod.fused.mu[1]).c_str());
        print_matrix2(prod.fused.sigma);
        std::printf("alpha  %s\n", format_double(prod.alpha).c_str());
        std::printf("gain   %s %s / %s %s\n", format_double(prod.kalman_gain(0, 0)).c_str(),
                    format_double(prod.kalman_gain(0, 1)).c_str(),
                    format_double(prod.kalman_gain(1, 0)).c_str(),
                    format_double(prod.kalman_gain(1, 1)).c_str());
        std::printf("kfiou  %s\n", format_double(kfiou(g1, g2)).c_str());
        const RotatedBox2D inv = gaussian_to_box(prod.fused);
        std::printf("box    %s\n", box_to_string(inv).c_str());
    }
    return 0;
}

int cmd_loss(const std::vector<std::string>& boxes, const std::string& anchor_text,
             const LossConfig& cfg) {
    const RotatedBox2D pred = parse_box2d(boxes[0]);
    const RotatedBox2D gt = parse_box2d(boxes[1]);
    const RotatedBox2D anchor = anchor_text.empty() ? gt : parse_box2d(anchor_text);
    const Gaussian2d gp = box2d_to_gaussian(pred);
    const Gaussian2d gg = box2d_to_gaussian(gt);
    std::printf("kfiou            %s\n", format_double(kfiou(gp, gg)).c_str());
    std::printf("kfiou_rescaled   %s\n", format_double(kfiou_rescaled(gp, gg)).c_str());
    std::printf("kf_loss[%s] %s\n", to_string(cfg.kf_form),
                format_double(kf_loss(pred, gt, cfg)).c_str());
    std::printf("regression_loss  %s\n",
                format_double(regression_loss(pred, gt, anchor, cfg)).c_str());
    std::printf("weighted (x%s) %s\n", format_double(cfg.lambda1).c_str(),
                format_double(weighted_regression_loss(pred, gt, anchor, cfg)).c_str());
    std::printf("gwd_loss         %s\n",
                format_double(gwd_loss(gp, gg, cfg.gwd_tau, cfg.gwd_f)).c_str());
    std::printf("kld_loss         %s\n",
                format_double(kld_loss(gp, gg, cfg.kld_tau, cfg.kld_f)).c_str());
    std::printf("smooth_l1_loss   %s\n",
                format_double(smooth_l1_box_loss(encode_box(pred, anchor),
                                                 encode_box(gt, anchor), cfg.smooth_l1_sigma))
                    .c_str());
    std::printf("exact_skew_iou   %s\n", format_double(skew_iou_2d(pred, gt)).c_str());
    return 0;
}

int cmd_evar(const PairProtocol& proto, const std::vector<SimMethod>& methods,
             const LossConfig& cfg, bool literal, bool assert_order, const std::string& out,
             const std::string& format, int threads) {
    std::vector<SimReport> reports;
    reports.reserve(methods.size());
    for (SimMethod m : methods) reports.push_back(emean_evar(proto, m, cfg, threads));

    std::printf("%-12s %14s %14s %14s\n", "method", "emean", "evar", "evar_literal");
    for (const SimReport& r : reports)
        std::printf("%-12s %14.9f %14.9f %14.9f\n", r.method.c_str(), r.emean,
                    r.effective_evar(literal), r.evar_literal);

    if (!out.empty()) {
        if (format == "json") {
            nlohmann::json arr = nlohmann::json::array();
            for (const SimReport& r : reports)
                arr.push_back(nlohmann::json::parse(sim_report_json(r, cfg)));
            write_output(out, arr.dump(2) + "\n");
        } else if (reports.size() == 1) {
            write_output(out, sim_report_csv(reports[0], cfg));
        } else {
            std::string csv = "method,emean,evar,evar_literal\n";
            for (const SimReport& r : reports)
                csv += r.method + "," + format_double(r.emean) + "," +
                       format_double(r.effective_evar(literal)) + "," +
                       format_double(r.evar_literal) + "\n";
            write_output(out, csv);
        }
    }

    if (assert_order) {
        const std::vector<SimMethod> order = {SimMethod::KFIoUKldCenter, SimMethod::KFIoU,
                                              SimMethod::KLD, SimMethod::GWD,
                                              SimMethod::SmoothL1};
        std::vector<double> evars;
        for (SimMethod m : order) evars.push_back(emean_evar(proto, m, cfg, threads).evar);
        for (std::size_t i = 0; i + 1 < evars.size(); ++i) {
            if (!(evars[i] < evars[i + 1])) {
                std::fprintf(stderr, "EVar ordering violated: %s=%g vs %s=%g\n",
                             to_string(order[i]), evars[i], to_string(order[i + 1]),
                             evars[i + 1]);
                return 1;
            }
        }
        std::printf("evar ordering holds\n");
    }
    return 0;
}

int cmd_bench(int n, bool three_d) {
    using clock = std::chrono::steady_clock;
    if (three_d) {
        std::vector<std::pair<RotatedBox3D, RotatedBox3D>> pairs;
        for (int i = 0; i < n; ++i) {
            CounterRng rng(1, static_cast<std::uint64_t>(i));
            pairs.push_back({{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20),
                              rng.uniform(2, 40), rng.uniform(2, 40), rng.uniform(2, 40),
                              rng.uniform(-90, 90)},
                             {rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20),
                              rng.uniform(2, 40), rng.uniform(2, 40), rng.uniform(2, 40),
                              rng.uniform(-90, 90)}});
        }
        double sink = 0.0;
        auto t0 = clock::now();
        for (const auto& [a, b] : pairs) sink += skew_iou_3d(a, b);
        auto t1 = clock::now();
        for (const auto& [a, b] : pairs) sink += kfiou(a, b);
        auto t2 = clock::now();
        const LossConfig cfg;
        for (const auto& [a, b] : pairs) sink += grad_regression_loss(a, b, b, cfg)[0];
        auto t3 = clock::now();
        const double inv = 1e9 / n;
        std::printf("exact_skew_iou_3d  %10.1f ns/op\n",
                    std::chrono::duration<double>(t1 - t0).count() * inv);
        std::printf("kfiou_3d           %10.1f ns/op\n",
                    std::chrono::duration<double>(t2 - t1).count() * inv);
        std::printf("grad_kf_loss_3d    %10.1f ns/op\n",
                    std::chrono::duration<double>(t3 - t2).count() * inv);
        if (sink == 42.0) std::printf("\n");  // keep the loops alive
        return 0;
    }
    std::vector<std::pair<RotatedBox2D, RotatedBox2D>> pairs;
    for (int i = 0; i < n; ++i) {
        CounterRng rng(2, static_cast<std::uint64_t>(i));
        pairs.push_back({{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(2, 40),
                          rng.uniform(2, 40), rng.uniform(-90, 90), AngleConvention::LongEdge},
                         {rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(2, 40),
                          rng.uniform(2, 40), rng.uniform(-90, 90), AngleConvention::LongEdge}});
    }
    double sink = 0.0;
    auto t0 = clock::now();
    for (const auto& [a, b] : pairs) sink += skew_iou_2d(a, b);
    auto t1 = clock::now();
    for (const auto& [a, b] : pairs) sink += kfiou(a, b);
    auto t2 = clock::now();
    const LossConfig cfg;
    for (const auto& [a, b] : pairs) sink += grad_regression_loss(a, b, b, cfg)[0];
    auto t3 = clock::now();
    const double inv = 1e9 / n;
    std::printf("exact_skew_iou  %10.1f ns/op\n",
                std::chrono::duration<double>(t1 - t0).count() * inv);
    std::printf("kfiou           %10.1f ns/op\n",
                std::chrono::duration<double>(t2 - t1).count() * inv);
    std::printf("grad_kf_loss    %10.1f ns/op\n",
                std::chrono::duration<double>(t3 - t2).count() * inv);
    if (sink == 42.0) std::printf("\n");
    return 0;
}

int cmd_selftest(bool as_json, const std::string& suite) {
    std::vector<SuiteResult> results;
    if (suite.empty())
        results = run_selftest();
    else
        results.push_back(run_selftest_suite(suite));

    bool ok = true;
    if (as_json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const SuiteResult& r : results) {
            arr.push_back({{"suite", r.name},
                           {"checks", r.checks},
                           {"failures", r.failures},
                           {"seconds", r.seconds},
                           {"notes", r.notes},
                           {"failure_messages", r.failure_messages}});
            if (!r.passed()) ok = false;
        }
        std::printf("%s\n", arr.dump(2).c_str());
    } else {
        for (const SuiteResult& r : results) {
            std::printf("[%s] %-18s %ld checks, %ld failures (%.2fs)\n",
                        r.passed() ? "PASS" : "FAIL", r.name.c_str(), r.checks, r.failures,
                        r.seconds);
            for (const std::string& note : r.notes) std::printf("       %s\n", note.c_str());
            for (const std::string& msg : r.failure_messages)
                std::printf("       failure: %s\n", msg.c_str());
            if (!r.passed()) ok = false;
        }
        std::printf("%s\n", ok ? "selftest passed" : "selftest FAILED");
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rotated-box IoU and Gaussian regression-loss toolkit"};
    app.require_subcommand(1);

    // iou
    auto* iou = app.add_subcommand("iou", "exact / KFIoU / rasterized IoU of a box pair");
    std::vector<std::string> iou_boxes;
    bool iou_3d = false, iou_all = false;
    std::string iou_mode = "exact";
    int iou_grid = 1000;
    std::string iou_file;
    iou->add_option("boxes", iou_boxes, "two boxes, x,y,w,h,theta (or 7-tuple with --3d)")
        ->expected(-2);
    iou->add_option("--file", iou_file, "read box pairs from a file, one pair per line");
    iou->add_flag("--3d", iou_3d, "boxes are x,y,z,w,h,l,theta");
    iou->add_flag("--2d", [](std::int64_t) {}, "boxes are x,y,w,h,theta (default)");
    iou->add_option("--mode", iou_mode, "exact|kfiou|raster")->default_val("exact");
    iou->add_option("--grid", iou_grid, "raster grid resolution")->default_val(1000);
    iou->add_flag("--all", iou_all, "print exact, kfiou and rescaled kfiou");

    // gauss
    auto* gauss = app.add_subcommand("gauss", "box -> Gaussian conversion (and product)");
    std::vector<std::string> gauss_boxes;
    gauss->add_option("boxes", gauss_boxes, "one or two 2-D boxes")
        ->expected(1, 2)
        ->required();

    // loss
    auto* loss = app.add_subcommand("loss", "loss values for a (pred, gt) box pair");
    std::vector<std::string> loss_boxes;
    std::string loss_anchor;
    ConfigFlags loss_cfg;
    loss->add_option("boxes", loss_boxes, "pred and gt boxes x,y,w,h,theta")
        ->expected(2)
        ->required();
    loss->add_option("--anchor", loss_anchor, "anchor box (defaults to gt)");
    loss_cfg.attach(loss);

    // evar
    auto* evar = app.add_subcommand("evar", "EMean/EVar trend-consistency report");
    ProtocolFlags evar_proto;
    ConfigFlags evar_cfg;
    std::string evar_methods, evar_out, evar_format = "csv";
    bool evar_literal = false, evar_assert = false;
    int evar_threads = default_thread_count();
    evar_proto.attach(evar);
    evar_cfg.attach(evar);
    evar->add_option("--methods", evar_methods,
                     "comma list: plain,kfiou,kfiou_kldc,gwd,kld,smooth_l1 (default all)");
    evar->add_option("--out", evar_out, "output file ('-' for stdout)");
    evar->add_option("--format", evar_format, "csv|json")->default_val("csv");
    evar->add_flag("--literal-evar", evar_literal,
                   "report the variance of the similarity values about EMean");
    evar->add_flag("--assert-order", evar_assert, "exit 1 unless the EVar ranking holds");
    evar->add_option("--threads", evar_threads, "worker threads (RBOX_THREADS overrides default)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "angle|aspect|deviation|scale curve tables");
    std::string sweep_kind, sweep_range = "0:90:1", sweep_out, sweep_methods;
    std::string sweep_devs = "0,1,2,3,4,5,6,7,8,9", sweep_scales = "1,2,4,10";
    double sweep_aspect = 4.0, sweep_dtheta = 30.0, sweep_dev = 0.0, sweep_area = 400.0;
    ProtocolFlags sweep_proto;
    ConfigFlags sweep_cfg;
    int sweep_threads = default_thread_count();
    sweep->add_option("kind", sweep_kind, "angle|aspect|deviation|scale")->required();
    sweep->add_option("--range", sweep_range, "lo:hi:step for angle/aspect sweeps");
    sweep->add_option("--aspect", sweep_aspect, "aspect ratio for the angle sweep");
    sweep->add_option("--dev", sweep_dev, "center deviation for the angle sweep (px)");
    sweep->add_option("--dtheta", sweep_dtheta, "angle difference for the aspect sweep (deg)");
    sweep->add_option("--area", sweep_area, "box area for the aspect sweep (px^2)");
    sweep->add_option("--devs", sweep_devs, "deviation list for the deviation sweep");
    sweep->add_option("--scales", sweep_scales, "scale list for the scale sweep");
    sweep->add_option("--methods", sweep_methods, "comma list of methods (default all)");
    sweep->add_option("--out", sweep_out, "output file ('-' for stdout)");
    sweep->add_option("--threads", sweep_threads, "worker threads");
    sweep_proto.attach(sweep);
    sweep_cfg.attach(sweep);

    // bench
    auto* bench = app.add_subcommand("bench", "ns/op for exact IoU, KFIoU and its gradient");
    int bench_n = 10000;
    bool bench_3d = false;
    bench->add_option("--n", bench_n, "pair count")->check(CLI::Range(1000, 100000000));
    bench->add_flag("--3d", bench_3d, "benchmark the 3-D path");

    // selftest
    auto* selftest = app.add_subcommand("selftest", "run the acceptance suites");
    bool selftest_json = false;
    std::string selftest_suite;
    selftest->add_flag("--json", selftest_json, "machine-readable results");
    selftest->add_option("--suite", selftest_suite, "run a single suite by name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (*iou) {
            if (!iou_file.empty()) {
                const auto pairs = read_pair_file(iou_file);
                // parse everything before printing anything
                for (const auto& [a, b] : pairs) {
                    if (iou_3d) {
                        parse_box3d(a);
                        parse_box3d(b);
                    } else {
                        parse_box2d(a);
                        parse_box2d(b);
                    }
                }
                for (const auto& [a, b] : pairs) cmd_iou({a, b}, iou_3d, iou_mode, iou_all, iou_grid);
                return 0;
            }
            if (iou_boxes.size() != 2)
                throw std::invalid_argument("expected two boxes (or --file)");
            return cmd_iou(iou_boxes, iou_3d, iou_mode, iou_all, iou_grid);
        }
        if (*gauss) return cmd_gauss(gauss_boxes);
        if (*loss) return cmd_loss(loss_boxes, loss_anchor, loss_cfg.resolve());
        if (*evar)
            return cmd_evar(evar_proto.resolve(), parse_methods(evar_methods),
                            evar_cfg.resolve(), evar_literal, evar_assert, evar_out, evar_format,
                            evar_threads);
        if (*sweep) {
            const LossConfig cfg = sweep_cfg.resolve();
            const auto methods = parse_methods(sweep_methods);
            SweepTable table;
            if (sweep_kind == "angle") {
                const RangeSpec r = parse_range(sweep_range);
                table = angle_sweep(sweep_aspect, sweep_dev, r.lo, r.hi, r.step, methods, cfg);
            } else if (sweep_kind == "aspect") {
                RangeSpec r{1.0, 8.0, 0.25};
                if (sweep->count("--range")) r = parse_range(sweep_range);
                table = aspect_sweep(sweep_dtheta, r.lo, r.hi, r.step, methods, cfg, sweep_area);
            } else if (sweep_kind == "deviation") {
                table = deviation_sweep(sweep_proto.resolve(), parse_list(sweep_devs), methods,
                                        cfg, sweep_threads);
            } else if (sweep_kind == "scale") {
                table = scale_sweep(sweep_proto.resolve(), parse_list(sweep_scales), methods, cfg,
                                    sweep_threads);
            } else {
                throw std::invalid_argument("unknown sweep kind '" + sweep_kind + "'");
            }
            write_output(sweep_out, sweep_csv(table, cfg));
            return 0;
        }
        if (*bench) return cmd_bench(bench_n, bench_3d);
        if (*selftest) return cmd_selftest(selftest_json, selftest_suite);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
