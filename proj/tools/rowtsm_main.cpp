// rowtsm: central crop-row detection, evaluation, and closed-loop simulation.
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "rowtsm/cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Triangle-scan crop-row detection, visual servoing simulation and evaluation"};
    app.require_subcommand(1);

    rowtsm::cli::DetectOptions det_opt;
    auto* detect = app.add_subcommand("detect", "Detect the central crop row in PGM masks");
    std::string det_config, det_out;
    std::vector<std::string> det_inputs;
    detect->add_option("--config", det_config, "Config file ([tsm] section)");
    detect->add_option("--out", det_out, "Output directory")->required();
    detect->add_flag("--curves", det_opt.curves, "Write anchor/line sum-curve CSVs");
    detect->add_flag("--overlay", det_opt.overlay, "Write masks with the detected line burned in");
    detect->add_option("--threshold", det_opt.load_threshold, "Foreground threshold on load")
        ->default_val(128);
    detect->add_option("masks", det_inputs, "Mask files or directories")->required();

    rowtsm::cli::EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "Score detections against ground truth");
    std::string eval_det, eval_truth, eval_out;
    eval->add_option("--det", eval_det, "Detections JSON-lines");
    eval->add_option("--truth", eval_truth, "Truth JSON-lines");
    eval->add_option("--dtheta-max", eval_opt.dtheta_max, "Angle normalization maximum (deg)");
    eval->add_option("--dlx2-max", eval_opt.dlx2_max, "Displacement normalization maximum (px)");
    eval->add_option("--fixtures", eval_opt.fixtures,
                     "'appendix_a' or a fixture CSV: verify the shipped error table");
    eval->add_option("--out", eval_out, "Output directory")->required();

    rowtsm::cli::SimulateOptions sim_opt;
    auto* simulate = app.add_subcommand("simulate", "Run closed-loop servoing trials");
    std::string sim_config, sim_out;
    double sim_heading = 0.0;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--config", sim_config, "Config file");
    auto* heading_flag =
        simulate->add_option("--heading", sim_heading, "Fixed initial heading (deg) for all trials");
    auto* seed_flag = simulate->add_option("--seed", sim_seed, "Seed override");
    simulate->add_option("--trials", sim_opt.trials, "Number of trials")->default_val(20);
    simulate->add_flag("!--serial", sim_opt.parallel, "Run trials sequentially");
    simulate->add_option("--out", sim_out, "Output directory")->required();

    rowtsm::cli::TuneOptions tune_opt;
    auto* tune = app.add_subcommand("tune", "Suggest B/C and anchor threshold from ground truth");
    std::string tune_truth, tune_ratios, tune_out;
    tune->add_option("--truth", tune_truth, "Truth JSON-lines")->required();
    tune->add_option("--ratios", tune_ratios, "Anchor peak-ratio CSV (from detect --curves)");
    tune->add_option("--min-freq", tune_opt.min_freq, "Outlier frequency cutoff")->default_val(5);
    tune->add_option("--out", tune_out, "Output directory")->required();

    rowtsm::cli::FixturesOptions fix_opt;
    auto* fixtures = app.add_subcommand("fixtures", "Emit and verify the shipped error table");
    std::string fix_out;
    fixtures->add_option("--out", fix_out, "Output directory")->default_val("fixtures_out");

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed()) {
            if (!det_config.empty()) det_opt.config_path = det_config;
            det_opt.out_dir = det_out;
            for (const std::string& in : det_inputs) det_opt.inputs.emplace_back(in);
            return rowtsm::cli::cmd_detect(det_opt, std::cout);
        }
        if (eval->parsed()) {
            eval_opt.det_path = eval_det;
            eval_opt.truth_path = eval_truth;
            eval_opt.out_dir = eval_out;
            if (eval_opt.fixtures.empty() && (eval_det.empty() || eval_truth.empty()))
                throw std::runtime_error("eval: need --det and --truth (or --fixtures)");
            return rowtsm::cli::cmd_eval(eval_opt, std::cout);
        }
        if (simulate->parsed()) {
            if (!sim_config.empty()) sim_opt.config_path = sim_config;
            if (heading_flag->count() > 0) sim_opt.heading_deg = sim_heading;
            if (seed_flag->count() > 0) sim_opt.seed = sim_seed;
            sim_opt.out_dir = sim_out;
            return rowtsm::cli::cmd_simulate(sim_opt, std::cout);
        }
        if (tune->parsed()) {
            tune_opt.truth_path = tune_truth;
            if (!tune_ratios.empty()) tune_opt.ratios_path = tune_ratios;
            tune_opt.out_dir = tune_out;
            return rowtsm::cli::cmd_tune(tune_opt, std::cout);
        }
        if (fixtures->parsed()) {
            fix_opt.out_dir = fix_out;
            return rowtsm::cli::cmd_fixtures(fix_opt, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
