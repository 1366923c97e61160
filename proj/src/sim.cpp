#include "rbox/sim.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rbox/rng.hpp"

namespace rbox {

const char* to_string(SimMethod m) {
    switch (m) {
        case SimMethod::PlainSkewIoU: return "plain";
        case SimMethod::KFIoU: return "kfiou";
        case SimMethod::KFIoUKldCenter: return "kfiou_kldc";
        case SimMethod::GWD: return "gwd";
        case SimMethod::KLD: return "kld";
        case SimMethod::SmoothL1: return "smooth_l1";
    }
    return "?";
}

SimMethod sim_method_from_string(const std::string& name) {
    for (SimMethod m : all_sim_methods())
        if (name == to_string(m)) return m;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::vector<SimMethod> all_sim_methods() {
    return {SimMethod::PlainSkewIoU, SimMethod::KFIoU, SimMethod::KFIoUKldCenter,
            SimMethod::GWD,          SimMethod::KLD,   SimMethod::SmoothL1};
}

namespace {

double wrap_half_turn(double theta) {
    double t = std::fmod(theta + 90.0, 180.0);
    if (t < 0.0) t += 180.0;
    return t - 90.0;
}

}  // namespace

std::pair<RotatedBox2D, RotatedBox2D> sample_pair(const PairProtocol& p, int index) {
    if (p.n_samples < 1 || p.extent_max < p.extent_min || p.aspect_max < p.aspect_min ||
        p.angle_max < p.angle_min || p.max_center_dev < 0.0 || p.max_angle_jitter < 0.0 ||
        p.extent_jitter < 0.0 || !(p.scale > 0.0))
        throw std::invalid_argument("invalid pair protocol");
    CounterRng rng(p.seed, static_cast<std::uint64_t>(index));
    // Fixed draw order keeps (seed, index) -> pair stable across options.
    const double cx = rng.uniform(0.0, 100.0);
    const double cy = rng.uniform(0.0, 100.0);
    const double s1 = rng.uniform(p.extent_min, p.extent_max);
    const double a1 = rng.uniform(p.aspect_min, p.aspect_max);
    const double th1 = rng.uniform(p.angle_min, p.angle_max);
    const double u_shape1 = rng.next_double();
    const double u_shape2 = rng.next_double();
    const double u_th2 = rng.next_double();
    const double dev_u = rng.next_double();
    const double dev_phi = rng.uniform(0.0, 6.283185307179586);

    const double dev_radius = p.max_center_dev * (p.scale_deviation ? p.scale : 1.0);
    const double r = dev_radius * std::sqrt(dev_u);
    double w2, h2, th2;
    if (p.independent_shapes) {
        const double s2 = p.extent_min + u_shape1 * (p.extent_max - p.extent_min);
        const double a2 = p.aspect_min + u_shape2 * (p.aspect_max - p.aspect_min);
        w2 = s2 * a2;
        h2 = s2;
        th2 = p.angle_min + u_th2 * (p.angle_max - p.angle_min);
    } else {
        // log-area and log-aspect perturbations of the reference box
        const double area_jit = (2.0 * u_shape1 - 1.0) * 0.5 * p.extent_jitter;
        const double aspect_jit = (2.0 * u_shape2 - 1.0) * 0.5 * p.extent_jitter;
        w2 = s1 * a1 * std::exp(area_jit + aspect_jit);
        h2 = s1 * std::exp(area_jit - aspect_jit);
        th2 = wrap_half_turn(th1 + (2.0 * u_th2 - 1.0) * p.max_angle_jitter);
    }

    RotatedBox2D b1{cx * p.scale,
                    cy * p.scale,
                    s1 * a1 * p.scale,
                    s1 * p.scale,
                    th1,
                    AngleConvention::LongEdge};
    RotatedBox2D b2{b1.x + r * std::cos(dev_phi),
                    b1.y + r * std::sin(dev_phi),
                    w2 * p.scale,
                    h2 * p.scale,
                    th2,
                    AngleConvention::LongEdge};
    return {b1, b2};
}

double method_similarity(const RotatedBox2D& b1, const RotatedBox2D& b2, SimMethod method,
                         const LossConfig& cfg) {
    switch (method) {
        case SimMethod::PlainSkewIoU:
            return skew_iou_2d(b1, b2);
        case SimMethod::KFIoU:
        case SimMethod::KFIoUKldCenter: {
            const Gaussian2d g1 = box2d_to_gaussian(b1);
            const Gaussian2d g2 = box2d_to_gaussian(b2);
            const double base = (cfg.rescale ? kfiou_rescale_factor(2) : 1.0) * kfiou(g1, g2);
            double center;
            if (method == SimMethod::KFIoU) {
                const EncodedBox pe = encode_box(b1, b2, AngleEncoding::Direct);
                const EncodedBox ge = encode_box(b2, b2, AngleEncoding::Direct);
                center = center_loss_smooth_l1(pe, ge, cfg.smooth_l1_sigma);
            } else {
                center = center_loss_kld_term(g1.mu, g2.mu, g2.sigma);
            }
            return base * std::exp(-center);
        }
        case SimMethod::GWD:
            return 1.0 / (cfg.gwd_tau + apply_dist_transform(
                                            gwd_distance(box2d_to_gaussian(b1),
                                                         box2d_to_gaussian(b2)),
                                            cfg.gwd_f));
        case SimMethod::KLD: {
            const Gaussian2d pred = box2d_to_gaussian(b1);
            const Gaussian2d target = box2d_to_gaussian(b2);
            const double d = cfg.kld_pred_first ? kld_divergence(pred, target)
                                                : kld_divergence(target, pred);
            return 1.0 / (cfg.kld_tau + apply_dist_transform(d, cfg.kld_f));
        }
        case SimMethod::SmoothL1: {
            const EncodedBox pe = encode_box(b1, b2, AngleEncoding::Direct);
            const EncodedBox ge = encode_box(b2, b2, AngleEncoding::Direct);
            return std::exp(-smooth_l1_box_loss(pe, ge, cfg.smooth_l1_sigma));
        }
    }
    return 0.0;
}

namespace {

void run_indexed(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || n < 2) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const int used = std::min(threads, n);
    pool.reserve(static_cast<std::size_t>(used));
    for (int t = 0; t < used; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += used) body(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace

SimReport emean_evar(const PairProtocol& protocol, SimMethod method, const LossConfig& cfg,
                     int threads) {
    SimReport rep;
    rep.method = to_string(method);
    rep.protocol = protocol;
    const int n = protocol.n_samples;
    rep.samples.assign(static_cast<std::size_t>(n), {0.0, 0.0});
    run_indexed(n, threads, [&](int i) {
        const auto [b1, b2] = sample_pair(protocol, i);
        rep.samples[static_cast<std::size_t>(i)] = {skew_iou_2d(b1, b2),
                                                    method_similarity(b1, b2, method, cfg)};
    });
    // Fixed-order reduction so results do not depend on the thread count.
    double err_sum = 0.0;
    for (const auto& [plain, app] : rep.samples) err_sum += plain - app;
    rep.emean = err_sum / n;
    double err_var = 0.0, app_var = 0.0;
    for (const auto& [plain, app] : rep.samples) {
        const double err = plain - app;
        err_var += (err - rep.emean) * (err - rep.emean);
        app_var += (app - rep.emean) * (app - rep.emean);
    }
    rep.evar = err_var / n;
    rep.evar_literal = app_var / n;
    return rep;
}

namespace {

std::vector<std::string> method_names(const std::vector<SimMethod>& methods) {
    std::vector<std::string> names;
    names.reserve(methods.size());
    for (SimMethod m : methods) names.emplace_back(to_string(m));
    return names;
}

}  // namespace

SweepTable angle_sweep(double aspect, double center_dev, double theta_min, double theta_max,
                       double step, const std::vector<SimMethod>& methods, const LossConfig& cfg,
                       double short_side) {
    if (!(step > 0.0)) throw std::invalid_argument("angle_sweep requires step > 0");
    SweepTable t;
    t.x_name = "theta_deg";
    t.methods = method_names(methods);
    const RotatedBox2D gt{0.0, 0.0, aspect * short_side, short_side, 0.0,
                          AngleConvention::LongEdge};
    for (double th = theta_min; th <= theta_max + 1e-9; th += step) {
        const RotatedBox2D pred{center_dev, 0.0, gt.w, gt.h, th, AngleConvention::LongEdge};
        t.x.push_back(th);
        std::vector<double> row;
        row.reserve(methods.size());
        for (SimMethod m : methods) row.push_back(1.0 - method_similarity(pred, gt, m, cfg));
        t.values.push_back(std::move(row));
    }
    return t;
}

SweepTable aspect_sweep(double delta_theta, double aspect_min, double aspect_max, double step,
                        const std::vector<SimMethod>& methods, const LossConfig& cfg,
                        double area) {
    if (!(step > 0.0)) throw std::invalid_argument("aspect_sweep requires step > 0");
    SweepTable t;
    t.x_name = "aspect";
    t.methods = method_names(methods);
    for (double a = aspect_min; a <= aspect_max + 1e-9; a += step) {
        const double h = std::sqrt(area / a);
        const RotatedBox2D gt{0.0, 0.0, a * h, h, 0.0, AngleConvention::LongEdge};
        const RotatedBox2D pred{0.0, 0.0, a * h, h, delta_theta, AngleConvention::LongEdge};
        t.x.push_back(a);
        std::vector<double> row;
        row.reserve(methods.size());
        for (SimMethod m : methods) row.push_back(1.0 - method_similarity(pred, gt, m, cfg));
        t.values.push_back(std::move(row));
    }
    return t;
}

SweepTable deviation_sweep(const PairProtocol& protocol, const std::vector<double>& deviations,
                           const std::vector<SimMethod>& methods, const LossConfig& cfg,
                           int threads) {
    SweepTable t;
    t.x_name = "center_dev";
    t.methods = method_names(methods);
    for (double dev : deviations) {
        PairProtocol p = protocol;
        p.max_center_dev = dev;
        t.x.push_back(dev);
        std::vector<double> row;
        row.reserve(methods.size());
        for (SimMethod m : methods) row.push_back(emean_evar(p, m, cfg, threads).evar);
        t.values.push_back(std::move(row));
    }
    return t;
}

SweepTable scale_sweep(const PairProtocol& protocol, const std::vector<double>& scales,
                       const std::vector<SimMethod>& methods, const LossConfig& cfg,
                       int threads) {
    SweepTable t;
    t.x_name = "scale";
    t.methods = method_names(methods);
    for (double s : scales) {
        PairProtocol p = protocol;
        p.scale = s;
        t.x.push_back(s);
        std::vector<double> row;
        row.reserve(methods.size());
        for (SimMethod m : methods) row.push_back(emean_evar(p, m, cfg, threads).evar);
        t.values.push_back(std::move(row));
    }
    return t;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

void append_config_comments(std::string& out, const LossConfig& cfg) {
    out += "# kf_form=" + std::string(to_string(cfg.kf_form));
    out += " center_form=" + std::string(to_string(cfg.center_form));
    out += " rescale=" + std::string(cfg.rescale ? "1" : "0");
    out += " epsilon=" + format_double(cfg.epsilon);
    out += " smooth_l1_sigma=" + format_double(cfg.smooth_l1_sigma);
    out += " gwd_tau=" + format_double(cfg.gwd_tau);
    out += " gwd_f=" + std::string(to_string(cfg.gwd_f));
    out += " kld_tau=" + format_double(cfg.kld_tau);
    out += " kld_f=" + std::string(to_string(cfg.kld_f));
    out += "\n";
}

void append_protocol_comments(std::string& out, const PairProtocol& p) {
    out += "# seed=" + std::to_string(p.seed);
    out += " n=" + std::to_string(p.n_samples);
    out += " max_center_dev=" + format_double(p.max_center_dev);
    out += " extent=[" + format_double(p.extent_min) + "," + format_double(p.extent_max) + "]";
    out += " aspect=[" + format_double(p.aspect_min) + "," + format_double(p.aspect_max) + "]";
    out += " angle=[" + format_double(p.angle_min) + "," + format_double(p.angle_max) + "]";
    out += " angle_jitter=" + format_double(p.max_angle_jitter);
    out += " extent_jitter=" + format_double(p.extent_jitter);
    out += " scale=" + format_double(p.scale);
    out += " scale_deviation=" + std::string(p.scale_deviation ? "1" : "0");
    out += " independent_shapes=" + std::string(p.independent_shapes ? "1" : "0");
    out += "\n";
}

nlohmann::json protocol_json(const PairProtocol& p) {
    return {{"seed", p.seed},
            {"n_samples", p.n_samples},
            {"max_center_dev", p.max_center_dev},
            {"extent_min", p.extent_min},
            {"extent_max", p.extent_max},
            {"aspect_min", p.aspect_min},
            {"aspect_max", p.aspect_max},
            {"angle_min", p.angle_min},
            {"angle_max", p.angle_max},
            {"max_angle_jitter", p.max_angle_jitter},
            {"extent_jitter", p.extent_jitter},
            {"scale", p.scale},
            {"scale_deviation", p.scale_deviation},
            {"independent_shapes", p.independent_shapes}};
}

PairProtocol protocol_from_json(const nlohmann::json& j) {
    PairProtocol p;
    p.seed = j.at("seed").get<std::uint64_t>();
    p.n_samples = j.at("n_samples").get<int>();
    p.max_center_dev = j.at("max_center_dev").get<double>();
    p.extent_min = j.at("extent_min").get<double>();
    p.extent_max = j.at("extent_max").get<double>();
    p.aspect_min = j.at("aspect_min").get<double>();
    p.aspect_max = j.at("aspect_max").get<double>();
    p.angle_min = j.at("angle_min").get<double>();
    p.angle_max = j.at("angle_max").get<double>();
    p.max_angle_jitter = j.at("max_angle_jitter").get<double>();
    p.extent_jitter = j.at("extent_jitter").get<double>();
    p.scale = j.at("scale").get<double>();
    p.scale_deviation = j.at("scale_deviation").get<bool>();
    p.independent_shapes = j.at("independent_shapes").get<bool>();
    return p;
}

}  // namespace

std::string sim_report_csv(const SimReport& report, const LossConfig& cfg) {
    std::string out;
    append_protocol_comments(out, report.protocol);
    append_config_comments(out, cfg);
    out += "# method=" + report.method;
    out += " emean=" + format_double(report.emean);
    out += " evar=" + format_double(report.evar);
    out += " evar_literal=" + format_double(report.evar_literal);
    out += "\n";
    out += "index,skewiou_plain,skewiou_app\n";
    for (std::size_t i = 0; i < report.samples.size(); ++i) {
        out += std::to_string(i);
        out += ",";
        out += format_double(report.samples[i].first);
        out += ",";
        out += format_double(report.samples[i].second);
        out += "\n";
    }
    return out;
}

std::string sim_report_json(const SimReport& report, const LossConfig& cfg) {
    nlohmann::json j;
    j["protocol"] = protocol_json(report.protocol);
    j["method"] = report.method;
    j["emean"] = report.emean;
    j["evar"] = report.evar;
    j["evar_literal"] = report.evar_literal;
    j["config"] = {{"kf_form", to_string(cfg.kf_form)},
                   {"center_form", to_string(cfg.center_form)},
                   {"rescale", cfg.rescale},
                   {"epsilon", cfg.epsilon},
                   {"smooth_l1_sigma", cfg.smooth_l1_sigma},
                   {"gwd_tau", cfg.gwd_tau},
                   {"gwd_f", to_string(cfg.gwd_f)},
                   {"kld_tau", cfg.kld_tau},
                   {"kld_f", to_string(cfg.kld_f)}};
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& [plain, app] : report.samples) samples.push_back({plain, app});
    j["samples"] = std::move(samples);
    return j.dump(2);
}

SimReport sim_report_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SimReport rep;
    rep.protocol = protocol_from_json(j.at("protocol"));
    rep.method = j.at("method").get<std::string>();
    rep.emean = j.at("emean").get<double>();
    rep.evar = j.at("evar").get<double>();
    rep.evar_literal = j.at("evar_literal").get<double>();
    for (const auto& s : j.at("samples"))
        rep.samples.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
    return rep;
}

std::string sweep_csv(const SweepTable& table, const LossConfig& cfg) {
    std::string out;
    append_config_comments(out, cfg);
    out += table.x_name;
    for (const std::string& m : table.methods) out += "," + m;
    out += "\n";
    for (std::size_t r = 0; r < table.x.size(); ++r) {
        out += format_double(table.x[r]);
        for (double v : table.values[r]) out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

int default_thread_count() {
    if (const char* env = std::getenv("RBOX_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

}  // namespace rbox
