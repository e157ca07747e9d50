#include "rowtsm/cli_commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "rowtsm/svg.hpp"

namespace rowtsm::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::string format_double(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing: " + path.string());
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

}  // namespace

void RunManifest::validate() const {
    for (const fs::path& p : inputs)
        if (!fs::exists(p)) throw std::runtime_error("input does not exist: " + p.string());
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory: " + out_dir.string());
    if (config_path && !fs::exists(*config_path))
        throw std::runtime_error("config file does not exist: " + config_path->string());
}

std::string detection_to_jsonl(const DetectionRecord& rec) {
    ordered_json j;
    j["image"] = rec.image;
    j["lx1"] = rec.lx1;
    j["lx2"] = rec.lx2;
    j["theta_deg"] = rec.theta_deg;
    j["fallback"] = rec.fallback;
    return j.dump();
}

std::vector<DetectionRecord> read_detections_jsonl(const fs::path& path) {
    std::vector<DetectionRecord> out;
    for (const std::string& line : read_lines(path)) {
        const auto j = ordered_json::parse(line);
        DetectionRecord rec;
        rec.image = j.at("image").get<std::string>();
        rec.lx1 = j.at("lx1").get<int>();
        rec.lx2 = j.at("lx2").get<int>();
        rec.theta_deg = j.at("theta_deg").get<double>();
        rec.fallback = j.at("fallback").get<bool>();
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<TruthRecord> read_truth_jsonl(const fs::path& path) {
    std::vector<TruthRecord> out;
    for (const std::string& line : read_lines(path)) {
        const auto j = ordered_json::parse(line);
        TruthRecord rec;
        rec.image = j.at("image").get<std::string>();
        rec.truth.l_x2 = j.at("lx2").get<double>();
        rec.truth.theta_deg = j.at("theta_deg").get<double>();
        if (j.contains("lx1")) rec.truth.l_x1 = j.at("lx1").get<double>();
        if (j.contains("category")) rec.category = j.at("category").get<std::string>();
        out.push_back(std::move(rec));
    }
    return out;
}

std::optional<std::uint64_t> env_seed_override() {
    const char* v = std::getenv("ROWTSM_SEED");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(v, &end, 10);
    if (end == v || *end != '\0')
        throw std::runtime_error(std::string("ROWTSM_SEED is not an unsigned integer: ") + v);
    return parsed;
}

TsmConfig tsm_from_config(const config::Document& doc) {
    TsmConfig base;
    TsmConfig cfg;
    cfg.scale_factor_s = doc.get_double("tsm", "scale_factor_s", base.scale_factor_s);
    cfg.begin_b = doc.get_int("tsm", "begin_b", base.begin_b);
    cfg.cease_c = doc.get_int("tsm", "cease_c", base.cease_c);
    cfg.anchor_threshold_ratio =
        doc.get_double("tsm", "anchor_threshold_ratio", base.anchor_threshold_ratio);
    cfg.default_anchor = doc.get_int("tsm", "default_anchor", base.default_anchor);
    return cfg;
}

std::variant<PControllerConfig, IbvsConfig> controller_from_config(const config::Document& doc) {
    const std::string kind = doc.get_string("controller", "kind", "proportional");
    if (kind == "proportional") {
        PControllerConfig base;
        PControllerConfig cfg;
        cfg.alpha = doc.get_double("controller", "alpha", base.alpha);
        cfg.w1 = doc.get_double("controller", "w1", base.w1);
        cfg.w2 = doc.get_double("controller", "w2", base.w2);
        cfg.v_star = doc.get_double("controller", "v_star", base.v_star);
        cfg.validate();
        return cfg;
    }
    if (kind == "ibvs") {
        IbvsConfig cfg;
        cfg.lambda = doc.get_double("controller", "lambda", cfg.lambda);
        cfg.v_star = doc.get_double("controller", "v_star", cfg.v_star);
        const auto jv = doc.get_pair("controller", "jv", {cfg.jacobian_v[0], cfg.jacobian_v[1]});
        const auto jw = doc.get_pair("controller", "jw", {cfg.jacobian_w[0], cfg.jacobian_w[1]});
        cfg.jacobian_v = {jv.first, jv.second};
        cfg.jacobian_w = {jw.first, jw.second};
        cfg.validate();
        return cfg;
    }
    throw std::runtime_error("config [controller] kind must be proportional or ibvs, got: " +
                             kind);
}

FieldSpec field_from_config(const config::Document& doc) {
    FieldSpec base;
    FieldSpec spec;
    spec.row_spacing = doc.get_double("field", "row_spacing", base.row_spacing);
    spec.seed_spacing = doc.get_double("field", "seed_spacing", base.seed_spacing);
    spec.plant_height_mean = doc.get_double("field", "plant_height_mean", base.plant_height_mean);
    spec.plant_height_jitter =
        doc.get_double("field", "plant_height_jitter", base.plant_height_jitter);
    spec.row_length = doc.get_double("field", "row_length", base.row_length);
    spec.num_rows = doc.get_int("field", "num_rows", base.num_rows);
    spec.plant_radius_per_height =
        doc.get_double("field", "plant_radius_per_height", base.plant_radius_per_height);
    spec.plant_orientation_deg =
        doc.get_double("field", "plant_orientation_deg", base.plant_orientation_deg);
    spec.plant_orientation_randomized = doc.get_bool("field", "plant_orientation_randomized",
                                                     base.plant_orientation_randomized);
    spec.seed = doc.get_u64("field", "seed", base.seed);
    return spec;
}

CameraModel camera_from_config(const config::Document& doc) {
    CameraModel base;
    CameraModel cam;
    cam.hfov_deg = doc.get_double("camera", "hfov_deg", base.hfov_deg);
    cam.vfov_deg = doc.get_double("camera", "vfov_deg", base.vfov_deg);
    cam.pitch_deg = doc.get_double("camera", "pitch_deg", base.pitch_deg);
    cam.mount_height = doc.get_double("camera", "mount_height", base.mount_height);
    cam.render_width = doc.get_int("camera", "render_width", base.render_width);
    cam.render_height = doc.get_int("camera", "render_height", base.render_height);
    cam.output_size = doc.get_int("camera", "output_size", base.output_size);
    cam.direct_square = doc.get_bool("camera", "direct_square", base.direct_square);
    return cam;
}

std::optional<DegradeSpec> degrade_from_config(const config::Document& doc) {
    if (!doc.has_section("degrade")) return std::nullopt;
    DegradeSpec base;
    DegradeSpec spec;
    spec.dropout_block_size = doc.get_int("degrade", "block_size", base.dropout_block_size);
    spec.dropout_probability = doc.get_double("degrade", "dropout", base.dropout_probability);
    spec.speckle_probability = doc.get_double("degrade", "speckle", base.speckle_probability);
    spec.dilation_radius = doc.get_int("degrade", "dilation_radius", base.dilation_radius);
    spec.seed = doc.get_u64("degrade", "seed", base.seed);
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

int cmd_detect(const DetectOptions& opt, std::ostream& log) {
    RunManifest manifest{Command::detect, opt.config_path, opt.inputs, opt.out_dir, {}};
    manifest.validate();

    config::Document doc =
        opt.config_path ? config::Document::load(*opt.config_path) : config::Document{};
    const TsmConfig base_cfg = tsm_from_config(doc);

    // Expand directories, then order deterministically by filename.
    std::vector<fs::path> files;
    for (const fs::path& input : opt.inputs) {
        if (fs::is_directory(input)) {
            for (const auto& entry : fs::directory_iterator(input))
                if (entry.is_regular_file() && entry.path().extension() == ".pgm")
                    files.push_back(entry.path());
        } else {
            files.push_back(input);
        }
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return std::pair(a.filename().string(), a.string()) <
               std::pair(b.filename().string(), b.string());
    });
    if (files.empty()) {
        log << "detect: no input masks\n";
        return 1;
    }

    std::string jsonl;
    std::string ratios_csv = "image,anchor_peak_ratio\n";
    int failures = 0;
    for (const fs::path& file : files) {
        try {
            const BinaryMask mask = load_mask_file(file, opt.load_threshold);
            const TsmConfig cfg = base_cfg.scaled_for(mask.width);
            const std::string image = file.filename().string();
            const std::string stem = file.stem().string();

            const AnchorScanResult anchor = anchor_scan(mask, cfg);
            const LineScanResult line = line_scan(mask, anchor.l_x1, cfg);
            CropRowDetection det;
            det.l_x1 = anchor.l_x1;
            det.l_x2 = line.l_x2;
            det.delta_theta_deg = heading_from_endpoints(det.l_x1, det.l_x2, mask.height);
            det.anchor_fallback = anchor.fallback;
            det.anchor_peak_ratio = anchor.peak_ratio;
            det.line_peak = line.peak;

            jsonl += detection_to_jsonl(
                         {image, det.l_x1, det.l_x2, det.delta_theta_deg, det.anchor_fallback}) +
                     "\n";
            ratios_csv += image + "," + format_double(det.anchor_peak_ratio) + "\n";

            if (opt.curves) {
                write_curve_csv(anchor.curve, opt.out_dir / (stem + "_anchor_curve.csv"));
                write_curve_csv(line.curve, opt.out_dir / (stem + "_line_curve.csv"));
            }
            if (opt.overlay) {
                auto bytes = save_mask(mask);
                const std::size_t payload = bytes.size() - mask.pixels.size();
                for (const PixelCoord& px : rasterize_segment({det.l_x1, 0},
                                                              {det.l_x2, mask.height - 1})) {
                    auto& b = bytes[payload + static_cast<std::size_t>(px.y) * mask.width + px.x];
                    b = static_cast<std::uint8_t>(255 - b);
                }
                std::ofstream out(opt.out_dir / (stem + "_overlay.pgm"), std::ios::binary);
                out.write(reinterpret_cast<const char*>(bytes.data()),
                          static_cast<std::streamsize>(bytes.size()));
            }
        } catch (const std::exception& e) {
            log << "detect: " << file.string() << ": " << e.what() << "\n";
            ++failures;
        }
    }

    write_text_file(opt.out_dir / "detections.jsonl", jsonl);
    if (opt.curves) write_text_file(opt.out_dir / "anchor_ratios.csv", ratios_csv);
    log << "detect: " << (files.size() - failures) << "/" << files.size() << " masks processed\n";
    return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

bool verify_appendix_a(std::span<const AppendixARow> fixture, const fs::path& report_csv,
                       std::ostream& log) {
    const auto results = reproduce_appendix_a(fixture);

    std::string csv =
        "class,eps_b_pct,eps_pct,eps_b_reported,eps_reported,dev_b_pp,dev_pp\n";
    bool rows_ok = true;
    double worst = 0.0, sum_b = 0.0, sum_o = 0.0, sum_b_rep = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const AppendixAResult& r = results[i];
        const AppendixARow& row = fixture[i];
        const double dev_b = std::abs(r.eps_b_pct - row.eps_b_reported);
        const double dev = std::abs(r.eps_pct - row.eps_reported);
        worst = std::max({worst, dev_b, dev});
        rows_ok = rows_ok && dev_b <= 0.1 && dev <= 0.1;
        sum_b += r.eps_b_pct;
        sum_o += r.eps_pct;
        sum_b_rep += row.eps_b_reported;
        csv += std::to_string(r.cls) + "," + format_double(r.eps_b_pct, 3) + "," +
               format_double(r.eps_pct, 3) + "," + format_double(row.eps_b_reported, 2) + "," +
               format_double(row.eps_reported, 2) + "," + format_double(dev_b, 3) + "," +
               format_double(dev, 3) + "\n";
    }

    const double n = static_cast<double>(results.size());
    const double avg_b = sum_b / n, avg_o = sum_o / n;
    csv += "average," + format_double(avg_b, 3) + "," + format_double(avg_o, 3) + ",,,,\n";
    write_text_file(report_csv, csv);

    log << "appendix A: " << results.size() << " classes recomputed, worst per-class deviation "
        << format_double(worst, 3) << " pp\n";

    bool avg_ok = true;
    if (results.size() == appendix_a_table().size()) {
        const double dev_avg = std::abs(avg_o - kAppendixAvgEpsPct);
        // The printed average eps_B cell (50.65) duplicates the baseline
        // displacement column; validate against the per-class column mean.
        const double col_mean_b = sum_b_rep / n;
        const double dev_avg_b = std::abs(avg_b - col_mean_b);
        avg_ok = dev_avg <= 0.3 && dev_avg_b <= 0.3;
        log << "appendix A: average eps " << format_double(avg_o, 3) << " vs printed "
            << format_double(kAppendixAvgEpsPct, 2) << " (dev " << format_double(dev_avg, 3)
            << " pp); average eps_B " << format_double(avg_b, 3) << " vs per-class column mean "
            << format_double(col_mean_b, 3) << " (printed cell "
            << format_double(kAppendixAvgEpsBPrintedPct, 2)
            << " duplicates the displacement column)\n";
    }
    log << (rows_ok && avg_ok ? "appendix A: reproduction OK\n"
                              : "appendix A: reproduction FAILED\n");
    return rows_ok && avg_ok;
}

int cmd_eval(const EvalOptions& opt, std::ostream& log) {
    if (!opt.fixtures.empty()) {
        RunManifest manifest{Command::eval, {}, {}, opt.out_dir, {}};
        manifest.validate();
        if (opt.fixtures == "appendix_a")
            return verify_appendix_a(appendix_a_table(),
                                     opt.out_dir / "appendix_a_reproduction.csv", log)
                       ? 0
                       : 1;
        std::ifstream in(opt.fixtures);
        if (!in) throw std::runtime_error("cannot open fixture: " + opt.fixtures);
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto rows = parse_appendix_a_csv(buf.str());
        return verify_appendix_a(rows, opt.out_dir / "appendix_a_reproduction.csv", log) ? 0 : 1;
    }

    RunManifest manifest{Command::eval, {}, {opt.det_path, opt.truth_path}, opt.out_dir, {}};
    manifest.validate();
    if (opt.dtheta_max <= 0.0 || opt.dlx2_max <= 0.0)
        throw std::runtime_error("eval: --dtheta-max and --dlx2-max must be positive");

    std::map<std::string, DetectionRecord> dets;
    for (auto& d : read_detections_jsonl(opt.det_path)) dets[d.image] = d;
    std::map<std::string, TruthRecord> truths;
    for (auto& t : read_truth_jsonl(opt.truth_path)) truths[t.image] = t;

    std::vector<EvalRecord> records;
    std::map<std::string, std::vector<EvalRecord>> by_category;
    std::vector<std::string> unmatched;
    for (const auto& [id, det] : dets) {
        const auto it = truths.find(id);
        if (it == truths.end()) {
            unmatched.push_back(id + " (no truth)");
            continue;
        }
        EvalRecord rec;
        rec.image_id = id;
        rec.category = it->second.category;
        rec.dtheta_abs = std::abs(det.theta_deg - it->second.truth.theta_deg);
        rec.dlx2_abs = std::abs(det.lx2 - it->second.truth.l_x2);
        if (!rec.category.empty()) by_category[rec.category].push_back(rec);
        records.push_back(std::move(rec));
    }
    for (const auto& [id, t] : truths)
        if (!dets.contains(id)) unmatched.push_back(id + " (no detection)");

    for (const std::string& id : unmatched) log << "eval: unmatched: " << id << "\n";
    if (records.empty()) throw std::runtime_error("eval: empty join between detections and truth");

    std::string csv = "category,n,mean_dtheta_deg,mean_dlx2_px,epsilon_pct\n";
    for (const auto& [category, recs] : by_category) {
        const EpsilonReport rep = epsilon(recs, opt.dtheta_max, opt.dlx2_max);
        csv += category + "," + std::to_string(rep.n) + "," + format_double(rep.mean_dtheta) +
               "," + format_double(rep.mean_dlx2) + "," +
               format_double(100.0 * rep.epsilon, 3) + "\n";
    }
    const EpsilonReport overall = epsilon(records, opt.dtheta_max, opt.dlx2_max);
    csv += "overall," + std::to_string(overall.n) + "," + format_double(overall.mean_dtheta) +
           "," + format_double(overall.mean_dlx2) + "," +
           format_double(100.0 * overall.epsilon, 3) + "\n";
    write_text_file(opt.out_dir / "epsilon_report.csv", csv);

    log << "eval: " << overall.n << " images, epsilon " << format_double(100.0 * overall.epsilon, 2)
        << "%\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const SimulateOptions& opt, std::ostream& log) {
    RunManifest manifest{Command::simulate, opt.config_path, {}, opt.out_dir,
                         env_seed_override() ? env_seed_override() : opt.seed};
    manifest.validate();
    if (opt.trials < 1) throw std::runtime_error("simulate: need at least one trial");

    config::Document doc =
        opt.config_path ? config::Document::load(*opt.config_path) : config::Document{};

    FieldSpec field_spec = field_from_config(doc);
    const CameraModel cam = camera_from_config(doc);
    const auto controller = controller_from_config(doc);
    const TsmConfig tsm = tsm_from_config(doc);
    std::optional<DegradeSpec> degrade_spec = degrade_from_config(doc);

    std::uint64_t protocol_seed = doc.get_u64("trial", "seed", 42);
    if (manifest.seed_override) {
        field_spec.seed = *manifest.seed_override;
        protocol_seed = splitmix64(*manifest.seed_override ^ 1);
        if (degrade_spec) degrade_spec->seed = splitmix64(*manifest.seed_override ^ 2);
    }

    const Field field = generate_field(field_spec);

    // Protocol: first half positive initial headings, second half negative,
    // magnitudes drawn uniformly from (0, 20].
    std::mt19937_64 gen(protocol_seed);
    std::vector<TrialConfig> configs;
    configs.reserve(static_cast<std::size_t>(opt.trials));
    for (int i = 0; i < opt.trials; ++i) {
        TrialConfig cfg;
        cfg.frame_distance = doc.get_double("trial", "frame_distance", cfg.frame_distance);
        cfg.max_frames = doc.get_int("trial", "max_frames", cfg.max_frames);
        cfg.followed_row = doc.get_int("trial", "followed_row", cfg.followed_row);
        cfg.controller = controller;
        cfg.tsm = tsm;
        if (degrade_spec) {
            DegradeSpec per_trial = *degrade_spec;
            per_trial.seed ^= splitmix64(static_cast<std::uint64_t>(i) + 1000);
            cfg.degrade = per_trial;
        }
        if (opt.heading_deg) {
            cfg.initial_heading_deg = *opt.heading_deg;
        } else {
            const double magnitude = 20.0 * (1.0 - unit_uniform(gen));
            cfg.initial_heading_deg = i < (opt.trials + 1) / 2 ? magnitude : -magnitude;
        }
        configs.push_back(std::move(cfg));
    }

    // Run the trials (parallel over trials), keeping traces for file output.
    std::vector<TrialTrace> traces(configs.size());
    {
        std::atomic<int> next{0};
        const unsigned n_threads = opt.parallel
                                       ? std::min<unsigned>(std::max(
                                             1u, std::thread::hardware_concurrency()),
                                                            static_cast<unsigned>(configs.size()))
                                       : 1u;
        std::vector<std::thread> workers;
        for (unsigned t = 0; t < n_threads; ++t)
            workers.emplace_back([&] {
                for (int i = next.fetch_add(1); i < static_cast<int>(configs.size());
                     i = next.fetch_add(1))
                    traces[static_cast<std::size_t>(i)] =
                        run_trial(field, cam, configs[static_cast<std::size_t>(i)]);
            });
        for (auto& w : workers) w.join();
    }

    // Per-trial traces and stats.
    std::string summary_csv =
        "trial,initial_heading_deg,frames,settling_frames,mean_abs_theta_world_deg,"
        "mean_abs_lateral_m,terminated,divergent\n";
    double mean_settle = 0.0, mean_theta = 0.0, mean_lat = 0.0;
    int settled = 0, divergent = 0;
    std::size_t longest = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "trial_%02zu.csv", i);
        write_trace_csv(traces[i], opt.out_dir / name);

        const TrialStats st = trial_stats(traces[i], configs[i].initial_heading_deg);
        mean_settle += st.settling_frames;
        mean_theta += st.mean_abs_theta_world_deg;
        mean_lat += st.mean_abs_lateral_m;
        settled += st.settling_frames <= traces[i].max_frames;
        divergent += st.divergent;
        longest = std::max(longest, traces[i].frames.size());

        summary_csv += std::to_string(i) + "," + format_double(st.initial_heading_deg, 3) + "," +
                       std::to_string(st.frames) + "," + std::to_string(st.settling_frames) +
                       "," + format_double(st.mean_abs_theta_world_deg) + "," +
                       format_double(st.mean_abs_lateral_m) + "," +
                       (st.terminated_reason == TerminationReason::end_of_row ? "end_of_row"
                                                                              : "max_frames") +
                       "," + (st.divergent ? "yes" : "no") + "\n";
    }
    const double n = static_cast<double>(traces.size());
    mean_settle /= n;
    mean_theta /= n;
    mean_lat /= n;
    summary_csv += "mean,,," + format_double(mean_settle, 2) + "," + format_double(mean_theta) +
                   "," + format_double(mean_lat) + ",settled=" + std::to_string(settled) +
                   ",divergent=" + std::to_string(divergent) + "\n";
    write_text_file(opt.out_dir / "summary.csv", summary_csv);

    // Average |error| curves across active trials, plus Fig. 20/21-style SVGs.
    std::string avg_csv = "frame,mean_abs_theta_world_deg,mean_abs_dlx2_px\n";
    std::vector<double> avg_theta(longest, 0.0), avg_dlx2(longest, 0.0);
    for (std::size_t f = 0; f < longest; ++f) {
        double sum_t = 0.0, sum_l = 0.0;
        int active = 0;
        for (const TrialTrace& tr : traces) {
            if (f >= tr.frames.size()) continue;
            sum_t += std::abs(tr.frames[f].theta_world_deg);
            sum_l += std::abs(tr.frames[f].dlx2_px);
            ++active;
        }
        avg_theta[f] = active ? sum_t / active : 0.0;
        avg_dlx2[f] = active ? sum_l / active : 0.0;
        avg_csv += std::to_string(f) + "," + format_double(avg_theta[f]) + "," +
                   format_double(avg_dlx2[f]) + "\n";
    }
    write_text_file(opt.out_dir / "average_curve.csv", avg_csv);

    std::vector<svg::Series> theta_series, dlx2_series;
    for (const TrialTrace& tr : traces) {
        svg::Series st, sl;
        for (const TrialFrame& f : tr.frames) {
            st.values.push_back(f.theta_world_deg);
            sl.values.push_back(f.dlx2_px);
        }
        theta_series.push_back(std::move(st));
        dlx2_series.push_back(std::move(sl));
    }
    theta_series.push_back({avg_theta, true});
    dlx2_series.push_back({avg_dlx2, true});
    svg::write_line_chart(theta_series, "Heading error per frame (red: mean |error|)",
                          "theta [deg]", opt.out_dir / "theta_world_deg.svg");
    svg::write_line_chart(dlx2_series, "Displacement error per frame (red: mean |error|)",
                          "dL_x2 [px]", opt.out_dir / "dlx2_px.svg");

    log << "simulate: " << traces.size() << " trials, mean settling "
        << format_double(mean_settle, 2) << " frames, mean |theta| "
        << format_double(mean_theta, 3) << " deg, mean |lateral| "
        << format_double(mean_lat * 100.0, 3) << " cm, settled " << settled << "/"
        << traces.size() << ", divergent " << divergent << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------------

int cmd_tune(const TuneOptions& opt, std::ostream& log) {
    RunManifest manifest{Command::tune, {}, {opt.truth_path}, opt.out_dir, {}};
    if (opt.ratios_path) manifest.inputs.push_back(*opt.ratios_path);
    manifest.validate();

    const auto truths = read_truth_jsonl(opt.truth_path);
    if (truths.empty()) throw std::runtime_error("tune: truth file has no records");
    std::vector<int> lx2;
    lx2.reserve(truths.size());
    for (const TruthRecord& t : truths)
        lx2.push_back(static_cast<int>(std::lround(t.truth.l_x2)));

    const HyperparamSuggestion bc = suggest_bc(lx2, opt.min_freq);
    if (bc.degenerate)
        log << "tune: warning: retained band is degenerate (single column "
            << bc.begin_b << ")\n";

    std::string hist_csv = "column,count\n";
    for (const auto& [col, count] : bc.histogram)
        hist_csv += std::to_string(col) + "," + std::to_string(count) + "\n";
    write_text_file(opt.out_dir / "lx2_histogram.csv", hist_csv);

    std::string suggestion = "begin_b=" + std::to_string(bc.begin_b) + "\n" +
                             "cease_c=" + std::to_string(bc.cease_c) + "\n" +
                             "degenerate=" + (bc.degenerate ? std::string("true")
                                                            : std::string("false")) +
                             "\n";

    if (opt.ratios_path) {
        std::vector<double> ratios;
        for (const std::string& line : read_lines(*opt.ratios_path)) {
            const auto comma = line.rfind(',');
            const std::string fieldv = comma == std::string::npos ? line : line.substr(comma + 1);
            try {
                std::size_t used = 0;
                const double r = std::stod(fieldv, &used);
                if (used == fieldv.size()) ratios.push_back(r);
            } catch (const std::exception&) {
                // header or non-numeric line
            }
        }
        if (ratios.empty()) throw std::runtime_error("tune: ratios file has no numeric values");
        const double threshold = suggest_threshold(ratios);
        suggestion += "anchor_threshold_ratio=" + format_double(threshold, 4) + "\n";

        std::map<int, int> bins;  // 0.05-wide bins over [0, 1+]
        for (double r : ratios) ++bins[static_cast<int>(std::floor(r / 0.05))];
        std::string ratio_csv = "bin_start,count\n";
        for (const auto& [bin, count] : bins)
            ratio_csv += format_double(bin * 0.05, 2) + "," + std::to_string(count) + "\n";
        write_text_file(opt.out_dir / "ratio_histogram.csv", ratio_csv);
        log << "tune: threshold suggestion " << format_double(threshold, 4) << "\n";
    }

    write_text_file(opt.out_dir / "suggestion.txt", suggestion);
    log << "tune: B=" << bc.begin_b << " C=" << bc.cease_c << " from " << lx2.size()
        << " values\n";
    return 0;
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

int cmd_fixtures(const FixturesOptions& opt, std::ostream& log) {
    RunManifest manifest{Command::fixtures, {}, {}, opt.out_dir, {}};
    manifest.validate();
    write_text_file(opt.out_dir / "appendix_a.csv", appendix_a_fixture_csv());
    const bool ok = verify_appendix_a(appendix_a_table(),
                                      opt.out_dir / "appendix_a_reproduction.csv", log);
    return ok ? 0 : 1;
}

}  // namespace rowtsm::cli
