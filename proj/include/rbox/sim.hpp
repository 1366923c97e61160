#pragma once

// Trend-consistency simulator: seeded random box pairs, per-method
// similarity values in [0, 1], the EMean/EVar summary of the gap to exact
// SkewIoU, and the angle / aspect / deviation / scale sweeps.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rbox/losses.hpp"

namespace rbox {

enum class SimMethod : std::uint8_t {
    PlainSkewIoU,
    KFIoU,           // rescaled KFIoU with the smooth-L1 center factor
    KFIoUKldCenter,  // rescaled KFIoU with the KLD-term center factor
    GWD,
    KLD,
    SmoothL1,
};

const char* to_string(SimMethod m);
SimMethod sim_method_from_string(const std::string& name);
std::vector<SimMethod> all_sim_methods();

/// How random pairs are drawn. By default the second box is a perturbation
/// of the first: its log-area and log-aspect are shifted by
/// U(-extent_jitter, extent_jitter)/2 each, the angle is jittered by up to
/// max_angle_jitter and wrapped back into [-90, 90), and the center moves by
/// a uniform point in a disk of radius max_center_dev. With
/// independent_shapes the second box's extents, aspect and angle are instead
/// drawn independently from the same ranges as the first.
struct PairProtocol {
    std::uint64_t seed = 0;
    int n_samples = 1000;
    double max_center_dev = 5.0;    // px
    double extent_min = 4.0;        // short side, px
    double extent_max = 50.0;
    double aspect_min = 1.0;
    double aspect_max = 8.0;
    double angle_min = -90.0;       // degrees, range of the reference box's angle
    double angle_max = 90.0;
    double max_angle_jitter = 20.0; // degrees, perturbation of the second box
    double extent_jitter = 0.7;     // log-scale area/aspect perturbation bound
    double scale = 1.0;             // global multiplier on lengths and centers
    bool scale_deviation = false;   // whether max_center_dev scales too
    bool independent_shapes = false;
};

struct SimReport {
    std::string method;
    PairProtocol protocol;
    double emean = 0.0;
    double evar = 0.0;          // variance of (plain - app) about EMean
    double evar_literal = 0.0;  // variance of app about EMean, as printed in Eq-style form
    std::vector<std::pair<double, double>> samples;  // (skewiou_plain, skewiou_app)

    double effective_evar(bool literal) const { return literal ? evar_literal : evar; }
};

/// Deterministic pair for (protocol.seed, index); box1 is the reference box.
std::pair<RotatedBox2D, RotatedBox2D> sample_pair(const PairProtocol& protocol, int index);

/// Similarity in [0, 1]; the second box anchors offset encodings and the
/// target side of directional measures.
double method_similarity(const RotatedBox2D& b1, const RotatedBox2D& b2, SimMethod method,
                         const LossConfig& cfg);

/// One simulation run for one method. threads <= 1 runs sequentially;
/// results are identical for any thread count.
SimReport emean_evar(const PairProtocol& protocol, SimMethod method, const LossConfig& cfg,
                     int threads = 1);

struct SweepTable {
    std::string x_name;
    std::vector<double> x;
    std::vector<std::string> methods;
    std::vector<std::vector<double>> values;  // values[row][method]
};

/// Loss (1 - similarity) vs angle difference at fixed aspect ratio.
SweepTable angle_sweep(double aspect, double center_dev, double theta_min, double theta_max,
                       double step, const std::vector<SimMethod>& methods, const LossConfig& cfg,
                       double short_side = 10.0);

/// Loss vs aspect ratio at fixed angle difference; box area held constant.
SweepTable aspect_sweep(double delta_theta, double aspect_min, double aspect_max, double step,
                        const std::vector<SimMethod>& methods, const LossConfig& cfg,
                        double area = 400.0);

/// EVar vs center deviation, one protocol run per deviation value.
SweepTable deviation_sweep(const PairProtocol& protocol, const std::vector<double>& deviations,
                           const std::vector<SimMethod>& methods, const LossConfig& cfg,
                           int threads = 1);

/// EVar vs global scale; protocol.scale_deviation controls whether the
/// center deviation scales with the boxes.
SweepTable scale_sweep(const PairProtocol& protocol, const std::vector<double>& scales,
                       const std::vector<SimMethod>& methods, const LossConfig& cfg,
                       int threads = 1);

// Serialization. CSV starts with '# key=value' comment lines echoing the
// protocol and config, then a header row; numbers are locale-independent.
std::string sim_report_csv(const SimReport& report, const LossConfig& cfg);
std::string sim_report_json(const SimReport& report, const LossConfig& cfg);
SimReport sim_report_from_json(const std::string& text);
std::string sweep_csv(const SweepTable& table, const LossConfig& cfg);

std::string format_double(double v);

/// Default worker count: RBOX_THREADS if set, else 1.
int default_thread_count();

}  // namespace rbox
