#include "rowtsm/field_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <thread>

namespace rowtsm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// Camera basis (right, down, forward) plus the pinhole intrinsics of the
// 16:9 render raster.
struct CameraRig {
    Vec3 origin, right, down, forward;
    double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;  // render raster intrinsics
    int render_w = 0, render_h = 0;
};

CameraRig make_rig(const RobotState& robot, const CameraModel& cam) {
    const double cy_ = std::cos(robot.heading), sy_ = std::sin(robot.heading);
    const double pitch = deg2rad(cam.pitch_deg);
    const double cp = std::cos(pitch), sp = std::sin(pitch);

    CameraRig rig;
    rig.origin = {robot.x, robot.y, cam.mount_height};
    rig.forward = {cp * cy_, cp * sy_, sp};
    rig.right = {sy_, -cy_, 0.0};
    rig.down = {sp * cy_, sp * sy_, -cp};
    if (cam.direct_square) {
        rig.render_w = cam.output_size;
        rig.render_h = cam.output_size;
    } else {
        rig.render_w = cam.render_width;
        rig.render_h = cam.render_height;
    }
    rig.fx = (rig.render_w / 2.0) / std::tan(deg2rad(cam.hfov_deg) / 2.0);
    rig.fy = (rig.render_h / 2.0) / std::tan(deg2rad(cam.vfov_deg) / 2.0);
    rig.cx = rig.render_w / 2.0;
    rig.cy = rig.render_h / 2.0;
    return rig;
}

// Projects a world point onto the render raster (continuous pixel coords).
// Returns false when the point is at or behind the camera plane.
bool project(const CameraRig& rig, Vec3 p, double& u, double& v) {
    const Vec3 d = p - rig.origin;
    const double z = dot(d, rig.forward);
    if (z <= 1e-9) return false;
    u = rig.cx + rig.fx * dot(d, rig.right) / z;
    v = rig.cy + rig.fy * dot(d, rig.down) / z;
    return true;
}

// Uniform grid over plant discs; each plant is inserted into every cell its
// disc touches so a lookup only has to test one cell's list.
class PlantGrid {
public:
    explicit PlantGrid(const Field& field) {
        if (field.plants.empty()) return;
        min_x_ = min_y_ = 1e30;
        max_x_ = max_y_ = -1e30;
        for (const Plant& p : field.plants) {
            min_x_ = std::min(min_x_, p.x - p.canopy_radius);
            max_x_ = std::max(max_x_, p.x + p.canopy_radius);
            min_y_ = std::min(min_y_, p.y - p.canopy_radius);
            max_y_ = std::max(max_y_, p.y + p.canopy_radius);
        }
        nx_ = std::max(1, static_cast<int>((max_x_ - min_x_) / cell_) + 1);
        ny_ = std::max(1, static_cast<int>((max_y_ - min_y_) / cell_) + 1);
        cells_.resize(static_cast<std::size_t>(nx_) * ny_);
        for (std::size_t i = 0; i < field.plants.size(); ++i) {
            const Plant& p = field.plants[i];
            const int x0 = cell_index_x(p.x - p.canopy_radius);
            const int x1 = cell_index_x(p.x + p.canopy_radius);
            const int y0 = cell_index_y(p.y - p.canopy_radius);
            const int y1 = cell_index_y(p.y + p.canopy_radius);
            for (int cy = y0; cy <= y1; ++cy)
                for (int cx = x0; cx <= x1; ++cx)
                    cells_[static_cast<std::size_t>(cy) * nx_ + cx].push_back(
                        static_cast<int>(i));
        }
        plants_ = field.plants.data();
        empty_ = false;
    }

    bool hit(double gx, double gy) const {
        if (empty_ || gx < min_x_ || gx > max_x_ || gy < min_y_ || gy > max_y_) return false;
        const auto& cell = cells_[static_cast<std::size_t>(cell_index_y(gy)) * nx_ +
                                  cell_index_x(gx)];
        for (int idx : cell) {
            const Plant& p = plants_[idx];
            const double dx = gx - p.x, dy = gy - p.y;
            if (dx * dx + dy * dy <= p.canopy_radius * p.canopy_radius) return true;
        }
        return false;
    }

private:
    int cell_index_x(double x) const {
        return std::clamp(static_cast<int>((x - min_x_) / cell_), 0, nx_ - 1);
    }
    int cell_index_y(double y) const {
        return std::clamp(static_cast<int>((y - min_y_) / cell_), 0, ny_ - 1);
    }

    static constexpr double cell_ = 0.25;
    const Plant* plants_ = nullptr;
    std::vector<std::vector<int>> cells_;
    double min_x_ = 0.0, max_x_ = 0.0, min_y_ = 0.0, max_y_ = 0.0;
    int nx_ = 0, ny_ = 0;
    bool empty_ = true;
};

// True when the view ray through render-raster point (u, v) hits ground
// inside some canopy disc.
bool sample_ray(const CameraRig& rig, const PlantGrid& grid, double u, double v) {
    const double du = (u - rig.cx) / rig.fx;
    const double dv = (v - rig.cy) / rig.fy;
    const Vec3 dir = rig.right * du + rig.down * dv + rig.forward;
    if (dir.z >= -1e-12) return false;  // at or above the horizon
    const double t = -rig.origin.z / dir.z;
    return grid.hit(rig.origin.x + t * dir.x, rig.origin.y + t * dir.y);
}

BinaryMask render_grid(const Field& field, const RobotState& robot, const CameraModel& cam,
                       bool full_raster) {
    cam.validate();
    const CameraRig rig = make_rig(robot, cam);
    const PlantGrid grid(field);

    if (full_raster || cam.direct_square) {
        const int w = rig.render_w, h = rig.render_h;
        BinaryMask mask(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                mask.set(x, y, sample_ray(rig, grid, x + 0.5, y + 0.5));
        return mask;
    }

    // Nearest-neighbor resize sample positions of the 16:9 raster.
    const int out = cam.output_size;
    std::vector<double> us(static_cast<std::size_t>(out));
    std::vector<double> vs(static_cast<std::size_t>(out));
    for (int i = 0; i < out; ++i) {
        const int sx = std::min(rig.render_w - 1,
                                static_cast<int>((i + 0.5) * rig.render_w / out));
        const int sy = std::min(rig.render_h - 1,
                                static_cast<int>((i + 0.5) * rig.render_h / out));
        us[i] = sx + 0.5;
        vs[i] = sy + 0.5;
    }
    BinaryMask mask(out, out);
    for (int y = 0; y < out; ++y)
        for (int x = 0; x < out; ++x)
            mask.set(x, y, sample_ray(rig, grid, us[x], vs[y]));
    return mask;
}

}  // namespace

void FieldSpec::validate() const {
    if (row_spacing <= 0.0 || seed_spacing <= 0.0)
        throw std::invalid_argument("spacings must be positive");
    if (row_length <= 0.0) throw std::invalid_argument("row_length must be positive");
    if (num_rows < 1) throw std::invalid_argument("num_rows must be >= 1");
    if (plant_height_mean < 0.0 || plant_height_jitter < 0.0 ||
        plant_height_jitter > plant_height_mean)
        throw std::invalid_argument("need 0 <= jitter <= plant_height_mean");
    if (plant_radius_per_height <= 0.0)
        throw std::invalid_argument("plant_radius_per_height must be positive");
}

void CameraModel::validate() const {
    if (hfov_deg <= 0.0 || hfov_deg >= 180.0 || vfov_deg <= 0.0 || vfov_deg >= 180.0)
        throw std::invalid_argument("fov must lie in (0,180)");
    if (pitch_deg >= 0.0) throw std::invalid_argument("pitch must be negative (downward)");
    if (mount_height <= 0.0) throw std::invalid_argument("mount_height must be positive");
    if (render_width <= 0 || render_height <= 0 || output_size <= 0)
        throw std::invalid_argument("raster dimensions must be positive");
}

void TrialConfig::validate() const {
    if (std::abs(initial_heading_deg) > 20.0 + 1e-9)
        throw std::invalid_argument("initial heading outside protocol range [-20,+20] deg");
    if (frame_distance <= 0.0) throw std::invalid_argument("frame_distance must be positive");
    if (max_frames < 1) throw std::invalid_argument("max_frames must be >= 1");
}

Field generate_field(const FieldSpec& spec) {
    spec.validate();
    std::mt19937_64 gen(spec.seed);

    const int plants_per_row =
        static_cast<int>(std::floor(spec.row_length / spec.seed_spacing + 1e-9)) + 1;
    const double y0 = -(spec.num_rows - 1) / 2.0 * spec.row_spacing;

    Field field;
    field.plants.reserve(static_cast<std::size_t>(spec.num_rows) * plants_per_row);
    field.row_lines.reserve(static_cast<std::size_t>(spec.num_rows));
    for (int r = 0; r < spec.num_rows; ++r) {
        const double row_y = y0 + r * spec.row_spacing;
        field.row_lines.push_back({row_y, 0.0, spec.row_length});
        for (int k = 0; k < plants_per_row; ++k) {
            const double height =
                spec.plant_height_mean + spec.plant_height_jitter * (2.0 * unit_uniform(gen) - 1.0);
            field.plants.push_back(
                {k * spec.seed_spacing, row_y, height * spec.plant_radius_per_height});
        }
    }
    return field;
}

BinaryMask render_mask(const Field& field, const RobotState& robot, const CameraModel& cam) {
    return render_grid(field, robot, cam, /*full_raster=*/false);
}

BinaryMask render_wide_mask(const Field& field, const RobotState& robot, const CameraModel& cam) {
    return render_grid(field, robot, cam, /*full_raster=*/true);
}

CenterlineProjection project_centerline(const Field& field, const RobotState& robot,
                                        const CameraModel& cam, int row_index) {
    cam.validate();
    if (row_index < 0 || row_index >= static_cast<int>(field.row_lines.size()))
        throw std::invalid_argument("row_index out of range");
    const RowLine& row = field.row_lines[static_cast<std::size_t>(row_index)];
    const CameraRig rig = make_rig(robot, cam);

    CenterlineProjection res;

    // Depth along the optical axis is linear in the row parameter t:
    // z(t) = fwd.x * t + z_off. Pick two well-separated points in front of
    // the camera to pin the image line.
    const double z_off = dot(Vec3{0.0, row.y, 0.0} - rig.origin, rig.forward);
    if (std::abs(rig.forward.x) < 1e-9) return res;  // row runs parallel to image plane
    const double t_near = (0.5 - z_off) / rig.forward.x;
    const double t_far = (8.0 - z_off) / rig.forward.x;

    double u1, v1, u2, v2;
    if (!project(rig, {t_near, row.y, 0.0}, u1, v1) ||
        !project(rig, {t_far, row.y, 0.0}, u2, v2))
        return res;
    if (std::abs(v2 - v1) < 1e-9) return res;  // degenerate: horizontal image line

    // Map continuous render-raster coords to the square output.
    const int out = cam.output_size;
    double x1 = u1, y1 = v1, x2 = u2, y2 = v2;
    if (!cam.direct_square) {
        x1 = u1 * out / rig.render_w;
        y1 = v1 * out / rig.render_h;
        x2 = u2 * out / rig.render_w;
        y2 = v2 * out / rig.render_h;
    }

    const double slope = (x2 - x1) / (y2 - y1);
    res.l_x1 = x1 + slope * (0.5 - y1);
    res.l_x2 = x1 + slope * ((out - 0.5) - y1);
    res.theta_deg = rad2deg(std::atan((res.l_x2 - res.l_x1) / out));

    // Visible when some part of the physical row segment projects into the
    // vertical extent of the image.
    const double t_lo = std::max(row.x_start, (0.05 - z_off) / rig.forward.x);
    const double t_hi = row.x_end;
    if (t_lo < t_hi) {
        double ua, va, ub, vb;
        if (project(rig, {t_lo, row.y, 0.0}, ua, va) &&
            project(rig, {t_hi, row.y, 0.0}, ub, vb)) {
            const double v_min = std::min(va, vb), v_max = std::max(va, vb);
            res.visible = v_max >= 0.0 && v_min <= rig.render_h;
        }
    }
    return res;
}

RobotState step(const RobotState& robot, double v, double omega, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    RobotState next;
    next.heading = robot.heading + omega * dt;
    next.x = robot.x + v * std::cos(next.heading) * dt;
    next.y = robot.y + v * std::sin(next.heading) * dt;
    return next;
}

int default_followed_row(const Field& field) {
    return static_cast<int>(field.row_lines.size()) / 2;
}

namespace {

bool top_half_empty(const BinaryMask& mask) {
    const std::size_t half = static_cast<std::size_t>(mask.height / 2) * mask.width;
    for (std::size_t i = 0; i < half; ++i)
        if (mask.pixels[i]) return false;
    return true;
}

}  // namespace

TrialTrace run_trial(const Field& field, const CameraModel& cam, const TrialConfig& cfg) {
    cfg.validate();
    if (field.row_lines.empty()) throw std::invalid_argument("field has no rows");
    const int row_index = cfg.followed_row >= 0 ? cfg.followed_row : default_followed_row(field);
    if (row_index >= static_cast<int>(field.row_lines.size()))
        throw std::invalid_argument("followed_row out of range");
    const RowLine& row = field.row_lines[static_cast<std::size_t>(row_index)];

    const double v_star = std::visit([](const auto& c) { return c.v_star; }, cfg.controller);
    if (v_star <= 0.0) throw std::invalid_argument("v_star must be positive");
    const double dt = cfg.frame_distance / v_star;
    const TsmConfig tsm = cfg.tsm.scaled_for(cam.output_size);

    RobotState robot{row.x_start, row.y, deg2rad(cfg.initial_heading_deg)};

    TrialTrace trace;
    trace.max_frames = cfg.max_frames;
    trace.terminated_reason = TerminationReason::max_frames;

    for (int frame = 0; frame < cfg.max_frames; ++frame) {
        BinaryMask mask = render_mask(field, robot, cam);
        if (top_half_empty(mask)) {
            trace.terminated_reason = TerminationReason::end_of_row;
            break;
        }
        if (cfg.degrade) {
            DegradeSpec frame_spec = *cfg.degrade;
            frame_spec.seed ^= splitmix64(static_cast<std::uint64_t>(frame) + 1);
            mask = degrade(mask, frame_spec);
        }

        const CropRowDetection det = detect(mask, tsm);
        const ServoError err = servo_error(det, mask.width);
        const double omega = std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, PControllerConfig>)
                    return p_control(err, c);
                else
                    return ibvs_control(err, c);
            },
            cfg.controller);

        trace.frames.push_back({frame, rad2deg(robot.heading), robot.y - row.y,
                                err.delta_theta_deg, err.delta_lx2_px, omega});
        robot = step(robot, v_star, omega, dt);
    }
    return trace;
}

TrialStats trial_stats(const TrialTrace& trace, double initial_heading_deg,
                       double settling_band_deg) {
    TrialStats stats;
    stats.initial_heading_deg = initial_heading_deg;
    stats.frames = static_cast<int>(trace.frames.size());
    stats.terminated_reason = trace.terminated_reason;

    stats.settling_frames = trace.max_frames + 1;
    double sum_theta = 0.0, sum_lat = 0.0;
    bool settled = false;
    for (const TrialFrame& f : trace.frames) {
        sum_theta += std::abs(f.theta_world_deg);
        sum_lat += std::abs(f.lateral_m);
        if (!settled && std::abs(f.theta_world_deg) <= settling_band_deg) {
            stats.settling_frames = f.frame;
            settled = true;
        }
    }
    if (!trace.frames.empty()) {
        sum_theta /= static_cast<double>(trace.frames.size());
        sum_lat /= static_cast<double>(trace.frames.size());
    }
    stats.mean_abs_theta_world_deg = sum_theta;
    stats.mean_abs_lateral_m = sum_lat;
    stats.divergent = !settled ||
                      (!trace.frames.empty() && std::abs(trace.frames.back().lateral_m) > 0.3);
    return stats;
}

BatchSummary run_batch(const Field& field, const CameraModel& cam,
                       const std::vector<TrialConfig>& configs, bool parallel) {
    std::vector<TrialTrace> traces(configs.size());

    if (parallel && configs.size() > 1) {
        std::atomic<std::size_t> next{0};
        const unsigned n_threads =
            std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                               static_cast<unsigned>(configs.size()));
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < configs.size();
                     i = next.fetch_add(1))
                    traces[i] = run_trial(field, cam, configs[i]);
            });
        }
        for (auto& w : workers) w.join();
    } else {
        for (std::size_t i = 0; i < configs.size(); ++i)
            traces[i] = run_trial(field, cam, configs[i]);
    }

    BatchSummary summary;
    summary.trials.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        TrialStats stats = trial_stats(traces[i], configs[i].initial_heading_deg);
        summary.mean_abs_theta_world_deg += stats.mean_abs_theta_world_deg;
        summary.mean_abs_lateral_m += stats.mean_abs_lateral_m;
        summary.mean_settling_frames += stats.settling_frames;
        summary.settled_count += stats.settling_frames <= traces[i].max_frames;
        summary.trials.push_back(std::move(stats));
    }
    if (!configs.empty()) {
        const double n = static_cast<double>(configs.size());
        summary.mean_abs_theta_world_deg /= n;
        summary.mean_abs_lateral_m /= n;
        summary.mean_settling_frames /= n;
    }
    return summary;
}

std::array<double, 2> image_jacobian_heading(const Field& field, const RobotState& robot,
                                             const CameraModel& cam, int row_index) {
    const double d = deg2rad(0.25);
    RobotState lo = robot, hi = robot;
    lo.heading -= d;
    hi.heading += d;
    const CenterlineProjection a = project_centerline(field, lo, cam, row_index);
    const CenterlineProjection b = project_centerline(field, hi, cam, row_index);
    return {(b.l_x2 - a.l_x2) / (2.0 * d), (b.theta_deg - a.theta_deg) / (2.0 * d)};
}

std::string trace_to_csv(const TrialTrace& trace) {
    std::string out = "frame,theta_world_deg,lateral_m,theta_img_deg,dlx2_px,omega\n";
    char line[160];
    for (const TrialFrame& f : trace.frames) {
        std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", f.frame,
                      f.theta_world_deg, f.lateral_m, f.theta_img_deg, f.dlx2_px, f.omega);
        out += line;
    }
    return out;
}

void write_trace_csv(const TrialTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open trace csv: " + path.string());
    out << trace_to_csv(trace);
}

}  // namespace rowtsm
