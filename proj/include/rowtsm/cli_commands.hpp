// Subcommand implementations behind the rowtsm CLI, kept callable from tests.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rowtsm/config.hpp"
#include "rowtsm/eval.hpp"
#include "rowtsm/field_sim.hpp"

namespace rowtsm::cli {

enum class Command { detect, eval, simulate, tune, fixtures };

struct RunManifest {
    Command command = Command::detect;
    std::optional<std::filesystem::path> config_path;
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed_override;

    // Creates out_dir, checks inputs exist; throws std::runtime_error.
    void validate() const;
};

struct DetectionRecord {
    std::string image;
    int lx1 = 0;
    int lx2 = 0;
    double theta_deg = 0.0;
    bool fallback = false;
};

struct TruthRecord {
    std::string image;
    LineTruth truth;
    std::string category;
};

std::string detection_to_jsonl(const DetectionRecord& rec);
std::vector<DetectionRecord> read_detections_jsonl(const std::filesystem::path& path);
std::vector<TruthRecord> read_truth_jsonl(const std::filesystem::path& path);

// ROWTSM_SEED, when set, overrides every seed a command would otherwise use.
std::optional<std::uint64_t> env_seed_override();

// Config -> domain objects ([tsm], [controller], [field], [camera], [trial], [degrade]).
TsmConfig tsm_from_config(const config::Document& doc);
std::variant<PControllerConfig, IbvsConfig> controller_from_config(const config::Document& doc);
FieldSpec field_from_config(const config::Document& doc);
CameraModel camera_from_config(const config::Document& doc);
std::optional<DegradeSpec> degrade_from_config(const config::Document& doc);

struct DetectOptions {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> config_path;
    bool curves = false;
    bool overlay = false;
    int load_threshold = 128;
};

struct EvalOptions {
    std::filesystem::path det_path;
    std::filesystem::path truth_path;
    std::filesystem::path out_dir;
    double dtheta_max = 0.0;
    double dlx2_max = 0.0;
    std::string fixtures;  // "appendix_a" or a fixture csv path; selects fixtures mode
};

struct SimulateOptions {
    std::optional<std::filesystem::path> config_path;
    std::filesystem::path out_dir;
    int trials = 20;
    std::optional<double> heading_deg;  // fixed initial heading for every trial
    std::optional<std::uint64_t> seed;
    bool parallel = true;
};

struct TuneOptions {
    std::filesystem::path truth_path;
    std::optional<std::filesystem::path> ratios_path;
    std::filesystem::path out_dir;
    int min_freq = 5;
};

struct FixturesOptions {
    std::filesystem::path out_dir;
};

int cmd_detect(const DetectOptions& opt, std::ostream& log);
int cmd_eval(const EvalOptions& opt, std::ostream& log);
int cmd_simulate(const SimulateOptions& opt, std::ostream& log);
int cmd_tune(const TuneOptions& opt, std::ostream& log);
int cmd_fixtures(const FixturesOptions& opt, std::ostream& log);

// Shared by cmd_eval --fixtures and cmd_fixtures: recomputes the table,
// writes the comparison csv, logs the verdict. Returns true when every
// per-class value is within 0.1 pp and the Average row checks hold.
bool verify_appendix_a(std::span<const AppendixARow> fixture,
                       const std::filesystem::path& report_csv, std::ostream& log);

}  // namespace rowtsm::cli
