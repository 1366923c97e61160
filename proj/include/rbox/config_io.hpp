#pragma once

// Wire formats: comma-separated box tuples for the CLI and a plain
// key-value file for loss hyperparameters ('#' starts a comment).

#include <string>

#include "rbox/losses.hpp"

namespace rbox {

/// Parse "x,y,w,h,theta_deg". Errors name the offending field.
RotatedBox2D parse_box2d(const std::string& text,
                         AngleConvention convention = AngleConvention::OpenCV);

/// Parse "x,y,z,w,h,l,theta_deg".
RotatedBox3D parse_box3d(const std::string& text);

std::string box_to_string(const RotatedBox2D& b);
std::string box_to_string(const RotatedBox3D& b);

/// Keys: kf_form, epsilon, center_form, rescale, lambda1, smooth_l1_sigma,
/// gwd_tau, gwd_f, kld_tau, kld_f, kld_pred_first. Unknown keys are errors.
LossConfig parse_loss_config(const std::string& text);
LossConfig load_loss_config(const std::string& path);
std::string serialize_loss_config(const LossConfig& cfg);

}  // namespace rbox
