// Steering laws: proportional control on the detected line's errors, and an
// image-based visual-servoing law built on the image Jacobian pseudoinverse.
//
// Angle errors enter in degrees, displacement errors in pixels; the returned
// angular velocity is rad/s. Positive omega turns the robot left; the sign
// that maps image-right errors to right turns is folded into alpha.
#pragma once

#include <array>

#include "rowtsm/tsm.hpp"

namespace rowtsm {

struct ServoError {
    double delta_theta_deg = 0.0;  // detected line angle vs vertical
    double delta_lx2_px = 0.0;     // l_x2 minus image midpoint
};

struct PControllerConfig {
    double alpha = -0.04;  // rad/s per unit weighted error; negative by convention
    double w1 = 1.0;       // weight per degree
    double w2 = 0.20;      // weight per pixel
    double v_star = 0.3;   // forward speed, m/s

    void validate() const;  // throws std::invalid_argument
};

struct IbvsConfig {
    double lambda = 1.0;
    double v_star = 0.3;
    std::array<double, 2> jacobian_v{0.0, 0.0};  // d[dL, dtheta]/dt per unit v
    std::array<double, 2> jacobian_w{1.0, 0.0};  // d[dL, dtheta]/dt per unit omega

    void validate() const;  // throws std::invalid_argument
};

ServoError servo_error(const CropRowDetection& det, int width);

// omega = alpha * (w1 * dtheta + w2 * dL_x2)
double p_control(const ServoError& err, const PControllerConfig& cfg);

// omega = -Jw^+ (lambda * e + Jv * v*), e = [dL_x2, dtheta]
double ibvs_control(const ServoError& err, const IbvsConfig& cfg);

}  // namespace rowtsm
