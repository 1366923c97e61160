#include "rbox/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rbox/sim.hpp"

namespace rbox {

namespace {

double parse_field(const std::string& token, const char* field_name) {
    const std::string trimmed = [&] {
        std::string t = token;
        t.erase(0, t.find_first_not_of(" \t"));
        t.erase(t.find_last_not_of(" \t") + 1);
        return t;
    }();
    double value = 0.0;
    const char* begin = trimmed.data();
    const char* end = begin + trimmed.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw std::invalid_argument(std::string("field ") + field_name + ": '" + token +
                                    "' is not a number");
    return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

RotatedBox2D parse_box2d(const std::string& text, AngleConvention convention) {
    const auto parts = split(text, ',');
    if (parts.size() != 5)
        throw std::invalid_argument("2-D box needs 5 fields x,y,w,h,theta_deg; got " +
                                    std::to_string(parts.size()) + " in '" + text + "'");
    static const char* names[] = {"x", "y", "w", "h", "theta_deg"};
    double v[5];
    for (int i = 0; i < 5; ++i) v[i] = parse_field(parts[static_cast<std::size_t>(i)], names[i]);
    RotatedBox2D b{v[0], v[1], v[2], v[3], v[4], convention};
    validate_box(b);
    return b;
}

RotatedBox3D parse_box3d(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 7)
        throw std::invalid_argument("3-D box needs 7 fields x,y,z,w,h,l,theta_deg; got " +
                                    std::to_string(parts.size()) + " in '" + text + "'");
    static const char* names[] = {"x", "y", "z", "w", "h", "l", "theta_deg"};
    double v[7];
    for (int i = 0; i < 7; ++i) v[i] = parse_field(parts[static_cast<std::size_t>(i)], names[i]);
    RotatedBox3D b{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
    validate_box(b);
    return b;
}

std::string box_to_string(const RotatedBox2D& b) {
    return format_double(b.x) + "," + format_double(b.y) + "," + format_double(b.w) + "," +
           format_double(b.h) + "," + format_double(b.theta);
}

std::string box_to_string(const RotatedBox3D& b) {
    return format_double(b.x) + "," + format_double(b.y) + "," + format_double(b.z) + "," +
           format_double(b.w) + "," + format_double(b.h) + "," + format_double(b.l) + "," +
           format_double(b.theta);
}

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw std::invalid_argument("config key '" + key + "': expected bool, got '" + value + "'");
}

KfLossForm kf_form_from_string(const std::string& v) {
    for (KfLossForm f : {KfLossForm::Exp, KfLossForm::Linear, KfLossForm::NegLog,
                         KfLossForm::ExpRescaled, KfLossForm::NegLogRescaled})
        if (v == to_string(f)) return f;
    throw std::invalid_argument("unknown kf_form '" + v + "'");
}

DistTransform transform_from_string(const std::string& v) {
    if (v == "sqrt") return DistTransform::Sqrt;
    if (v == "log1p") return DistTransform::Log1p;
    throw std::invalid_argument("unknown distance transform '" + v + "'");
}

}  // namespace

LossConfig parse_loss_config(const std::string& text) {
    LossConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        if (key == "kf_form") {
            cfg.kf_form = kf_form_from_string(value);
        } else if (key == "epsilon") {
            cfg.epsilon = parse_field(value, "epsilon");
            if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
        } else if (key == "center_form") {
            if (value == "smooth_l1")
                cfg.center_form = CenterLossForm::SmoothL1;
            else if (value == "kld_term")
                cfg.center_form = CenterLossForm::KldTerm;
            else
                throw std::invalid_argument("unknown center_form '" + value + "'");
        } else if (key == "rescale") {
            cfg.rescale = parse_bool(value, key);
        } else if (key == "lambda1") {
            cfg.lambda1 = parse_field(value, "lambda1");
            if (!(cfg.lambda1 > 0.0)) throw std::invalid_argument("lambda1 must be > 0");
        } else if (key == "smooth_l1_sigma") {
            cfg.smooth_l1_sigma = parse_field(value, "smooth_l1_sigma");
            if (!(cfg.smooth_l1_sigma > 0.0))
                throw std::invalid_argument("smooth_l1_sigma must be > 0");
        } else if (key == "gwd_tau") {
            cfg.gwd_tau = parse_field(value, "gwd_tau");
            if (cfg.gwd_tau < 1.0) throw std::invalid_argument("gwd_tau must be >= 1");
        } else if (key == "gwd_f") {
            cfg.gwd_f = transform_from_string(value);
        } else if (key == "kld_tau") {
            cfg.kld_tau = parse_field(value, "kld_tau");
            if (cfg.kld_tau < 1.0) throw std::invalid_argument("kld_tau must be >= 1");
        } else if (key == "kld_f") {
            cfg.kld_f = transform_from_string(value);
        } else if (key == "kld_pred_first") {
            cfg.kld_pred_first = parse_bool(value, key);
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

LossConfig load_loss_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_loss_config(buf.str());
}

std::string serialize_loss_config(const LossConfig& cfg) {
    std::string out;
    out += "kf_form = " + std::string(to_string(cfg.kf_form)) + "\n";
    out += "epsilon = " + format_double(cfg.epsilon) + "\n";
    out += "center_form = " + std::string(to_string(cfg.center_form)) + "\n";
    out += "rescale = " + std::string(cfg.rescale ? "true" : "false") + "\n";
    out += "lambda1 = " + format_double(cfg.lambda1) + "\n";
    out += "smooth_l1_sigma = " + format_double(cfg.smooth_l1_sigma) + "\n";
    out += "gwd_tau = " + format_double(cfg.gwd_tau) + "\n";
    out += "gwd_f = " + std::string(to_string(cfg.gwd_f)) + "\n";
    out += "kld_tau = " + format_double(cfg.kld_tau) + "\n";
    out += "kld_f = " + std::string(to_string(cfg.kld_f)) + "\n";
    out += "kld_pred_first = " + std::string(cfg.kld_pred_first ? "true" : "false") + "\n";
    return out;
}

}  // namespace rbox
