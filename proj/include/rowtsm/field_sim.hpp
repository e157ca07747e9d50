// Deterministic geometric simulator: parametric crop field, pitched pinhole
// camera rendering binary masks, unicycle robot, closed-loop trials.
//
// Frames. World: x runs along the rows, y to the left, z up; heading 0 points
// along +x and increases counterclockwise. Camera: right/down/forward axes,
// mounted at mount_height above the robot origin and pitched down (pitch < 0).
// Plants are ground-plane discs; a mask pixel is foreground when its view ray
// hits the ground inside any canopy disc. Rendering samples the 16:9 raster
// exactly where a nearest-neighbor resize to the square output would read it,
// so the output equals render-then-resize bit for bit.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rowtsm/mask.hpp"
#include "rowtsm/servo.hpp"
#include "rowtsm/tsm.hpp"

namespace rowtsm {

struct FieldSpec {
    double row_spacing = 0.60;             // m
    double seed_spacing = 0.16;            // m
    double plant_height_mean = 0.06;       // m
    double plant_height_jitter = 0.03;     // m, uniform +/-
    double row_length = 6.0;               // m
    int num_rows = 20;
    double plant_radius_per_height = 1.0;  // canopy radius = height * factor
    double plant_orientation_deg = 145.0;  // recorded only; discs are isotropic
    bool plant_orientation_randomized = true;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

struct Plant {
    double x = 0.0;
    double y = 0.0;
    double canopy_radius = 0.0;
};

struct RowLine {
    double y = 0.0;        // centerline; rows run along world x
    double x_start = 0.0;
    double x_end = 0.0;
};

struct Field {
    std::vector<Plant> plants;
    std::vector<RowLine> row_lines;
};

struct CameraModel {
    double hfov_deg = 69.0;
    double vfov_deg = 42.0;
    double pitch_deg = -25.0;    // negative = looking down
    double mount_height = 0.35;  // m above ground
    int render_width = 1280;
    int render_height = 720;
    int output_size = 512;
    bool direct_square = false;  // ablation: skip the 16:9 path and its distortion

    void validate() const;  // throws std::invalid_argument
};

struct RobotState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // radians, 0 = along rows
};

enum class TerminationReason { end_of_row, max_frames };

struct TrialConfig {
    double initial_heading_deg = 0.0;        // protocol range [-20, +20]
    double frame_distance = 6.0 / 140.0;     // m of travel per frame
    int max_frames = 300;
    int followed_row = -1;                   // -1 = center row
    std::variant<PControllerConfig, IbvsConfig> controller = PControllerConfig{};
    TsmConfig tsm;
    std::optional<DegradeSpec> degrade;

    void validate() const;  // throws std::invalid_argument
};

struct TrialFrame {
    int frame = 0;
    double theta_world_deg = 0.0;  // robot heading error vs row direction
    double lateral_m = 0.0;        // signed distance to followed row centerline
    double theta_img_deg = 0.0;
    double dlx2_px = 0.0;
    double omega = 0.0;
};

struct TrialTrace {
    std::vector<TrialFrame> frames;
    TerminationReason terminated_reason = TerminationReason::max_frames;
    int max_frames = 0;
};

struct TrialStats {
    double initial_heading_deg = 0.0;
    int frames = 0;
    int settling_frames = 0;  // max_frames + 1 when the band is never reached
    double mean_abs_theta_world_deg = 0.0;
    double mean_abs_lateral_m = 0.0;
    TerminationReason terminated_reason = TerminationReason::max_frames;
    bool divergent = false;
};

struct BatchSummary {
    std::vector<TrialStats> trials;
    double mean_abs_theta_world_deg = 0.0;  // mean of per-trial means
    double mean_abs_lateral_m = 0.0;
    double mean_settling_frames = 0.0;
    int settled_count = 0;
};

// Exact image-space coordinates of a row centerline after the 1:1 resize.
struct CenterlineProjection {
    double l_x1 = 0.0;     // x at the top pixel row's center
    double l_x2 = 0.0;     // x at the bottom pixel row's center
    double theta_deg = 0.0;
    bool visible = false;
};

Field generate_field(const FieldSpec& spec);

BinaryMask render_mask(const Field& field, const RobotState& robot, const CameraModel& cam);

// Full-resolution 16:9 render, for the resize-path ablation and debugging.
BinaryMask render_wide_mask(const Field& field, const RobotState& robot, const CameraModel& cam);

CenterlineProjection project_centerline(const Field& field, const RobotState& robot,
                                        const CameraModel& cam, int row_index);

// Semi-implicit unicycle step: heading updates first, then position.
RobotState step(const RobotState& robot, double v, double omega, double dt);

TrialTrace run_trial(const Field& field, const CameraModel& cam, const TrialConfig& cfg);

BatchSummary run_batch(const Field& field, const CameraModel& cam,
                       const std::vector<TrialConfig>& configs, bool parallel);

TrialStats trial_stats(const TrialTrace& trace, double initial_heading_deg,
                       double settling_band_deg = 2.0);

int default_followed_row(const Field& field);

// d[dL_x2_px, dtheta_deg]/d(heading), by central finite difference on the
// analytic projection. Feeds IbvsConfig::jacobian_w for this camera setup.
std::array<double, 2> image_jacobian_heading(const Field& field, const RobotState& robot,
                                             const CameraModel& cam, int row_index);

std::string trace_to_csv(const TrialTrace& trace);
void write_trace_csv(const TrialTrace& trace, const std::filesystem::path& path);

}  // namespace rowtsm
