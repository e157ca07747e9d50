#include "rowtsm/servo.hpp"

#include <stdexcept>

namespace rowtsm {

void PControllerConfig::validate() const {
    if (alpha == 0.0) throw std::invalid_argument("alpha must be nonzero");
    if (w1 < 0.0 || w2 < 0.0) throw std::invalid_argument("weights must be nonnegative");
    if (w1 == 0.0 && w2 == 0.0) throw std::invalid_argument("at least one weight must be nonzero");
}

void IbvsConfig::validate() const {
    if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
    if (jacobian_w[0] == 0.0 && jacobian_w[1] == 0.0)
        throw std::invalid_argument("jacobian_w must be nonzero (pseudoinverse undefined)");
}

ServoError servo_error(const CropRowDetection& det, int width) {
    return ServoError{det.delta_theta_deg, det.l_x2 - width / 2.0};
}

double p_control(const ServoError& err, const PControllerConfig& cfg) {
    cfg.validate();
    return cfg.alpha * (cfg.w1 * err.delta_theta_deg + cfg.w2 * err.delta_lx2_px);
}

double ibvs_control(const ServoError& err, const IbvsConfig& cfg) {
    cfg.validate();
    const double e0 = err.delta_lx2_px;
    const double e1 = err.delta_theta_deg;
    // Moore-Penrose pseudoinverse of the column 2-vector Jw: Jw^T / (Jw^T Jw).
    const double jw_sq =
        cfg.jacobian_w[0] * cfg.jacobian_w[0] + cfg.jacobian_w[1] * cfg.jacobian_w[1];
    const double r0 = cfg.lambda * e0 + cfg.jacobian_v[0] * cfg.v_star;
    const double r1 = cfg.lambda * e1 + cfg.jacobian_v[1] * cfg.v_star;
    return -(cfg.jacobian_w[0] * r0 + cfg.jacobian_w[1] * r1) / jw_sq;
}

}  // namespace rowtsm
