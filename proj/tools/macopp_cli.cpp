// Command-line front end for the MA-COPP experiment pipeline.
//
// Subcommands:
//   gen-data   generate prefixes and continuations as JSONL files
//   train      fit the trajectory predictor and the one-step dynamics model
//   calibrate  build a (mode-specific) weighted calibration set CSV
//   evaluate   run one (mode, eps_bias) evaluation and append a report row
//   sweep      run the full eps_bias x mode grid and emit a combined CSV
//   report     re-emit a sweep CSV as the plot-ready long-format report

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "macopp/macopp.hpp"

namespace fs = std::filesystem;
using namespace macopp;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed_override = 0;
    bool has_seed = false;
};

ExperimentConfig load(const CommonOpts& o) {
    ExperimentConfig cfg = load_config(o.config_path);
    if (o.has_seed) cfg.seed = o.seed_override;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed_override, "override the config master seed")
        ->each([&o](const std::string&) { o.has_seed = true; });
}

std::string path_in(const CommonOpts& o, const std::string& name) {
    return (fs::path(o.out_dir) / name).string();
}

void write_dataset_files(const CommonOpts& o, const ExperimentConfig& cfg,
                         const BehaviouralData& behav, const TargetData& target) {
    std::vector<TrajectoryRecord> recs;
    long id = 0;
    for (const auto& t : behav.train_full) recs.push_back({id++, "train", "behavioural", t});
    write_trajectories(path_in(o, "train.jsonl"), recs);

    recs.clear();
    id = 0;
    for (std::size_t i = 0; i < behav.calib_full.size(); ++i) {
        recs.push_back({id, "calib", "behavioural", behav.calib_full[i]});
        recs.push_back({id, "calib", "target", target.calib_target_cont[i]});
        ++id;
    }
    write_trajectories(path_in(o, "calib.jsonl"), recs);

    recs.clear();
    id = 0;
    for (std::size_t i = 0; i < behav.test_prefix.size(); ++i) {
        recs.push_back({id, "test", "prefix", behav.test_prefix[i]});
        for (const auto& c : target.test_target_cont[i]) recs.push_back({id, "test", "target", c});
        ++id;
    }
    write_trajectories(path_in(o, "test.jsonl"), recs);
    (void)cfg;
}

int cmd_gen_data(const CommonOpts& o) {
    ExperimentConfig cfg = load(o);
    fs::create_directories(o.out_dir);
    BehaviouralData behav = generate_behavioural(cfg);
    TargetData target = generate_target(cfg, behav, cfg.eps_bias);
    write_dataset_files(o, cfg, behav, target);
    std::cout << "wrote train/calib/test JSONL to " << o.out_dir << " (eps_bias=" << cfg.eps_bias
              << ")\n";
    return 0;
}

BehaviouralData read_behavioural(const CommonOpts& o, const ExperimentConfig& cfg) {
    BehaviouralData d;
    for (const auto& r : read_trajectories(path_in(o, "train.jsonl")))
        d.train_full.push_back(r.traj);
    for (const auto& r : read_trajectories(path_in(o, "calib.jsonl")))
        if (r.kind == "behavioural") d.calib_full.push_back(r.traj);
    for (const auto& r : read_trajectories(path_in(o, "test.jsonl")))
        if (r.kind == "prefix") d.test_prefix.push_back(r.traj);
    (void)cfg;
    return d;
}

TargetData read_target(const CommonOpts& o, const ExperimentConfig& cfg) {
    TargetData d;
    d.eps_bias = cfg.eps_bias;
    for (const auto& r : read_trajectories(path_in(o, "calib.jsonl")))
        if (r.kind == "target") d.calib_target_cont.push_back(r.traj);
    long last_id = -1;
    for (const auto& r : read_trajectories(path_in(o, "test.jsonl"))) {
        if (r.kind == "prefix") {
            d.test_target_cont.emplace_back();
            last_id = r.id;
        } else if (r.kind == "target") {
            if (last_id < 0) throw std::runtime_error("test.jsonl: target record before prefix");
            d.test_target_cont.back().push_back(r.traj);
        }
    }
    return d;
}

int cmd_train(const CommonOpts& o) {
    ExperimentConfig cfg = load(o);
    BehaviouralData behav = read_behavioural(o, cfg);
    PredictorModel model =
        train_predictor(behav.train_full, cfg.prefix_len, cfg.suffix_len, cfg.ridge_lambda);
    DynamicsModel dyn = fit_dynamics(behav.train_full, cfg.ridge_lambda);
    save_predictor(path_in(o, "predictor.json"), model);
    save_dynamics(path_in(o, "dynamics.json"), dyn);
    std::cout << "trained predictor (sigma[0]=" << model.sigma[0] << ") and dynamics model\n";
    return 0;
}

int cmd_calibrate(const CommonOpts& o, const std::string& mode_str) {
    ExperimentConfig cfg = load(o);
    Mode mode = parse_mode(mode_str);
    BehaviouralData behav = read_behavioural(o, cfg);
    TargetData target = read_target(o, cfg);
    PredictorModel model = load_predictor(path_in(o, "predictor.json"));
    WeightedCalibrationSet calib = calibrate(cfg, behav, &target, model, mode, cfg.eps_bias);
    std::ofstream out(path_in(o, "calibration_" + mode_str + ".csv"));
    out << "score,weight\n";
    out.precision(17);
    for (const auto& r : calib.records) out << r.score << "," << r.weight << "\n";
    std::cout << "wrote " << calib.size() << " calibration records (sum_weights="
              << calib.sum_weights << ")\n";
    return 0;
}

int cmd_evaluate(const CommonOpts& o, const std::string& mode_str) {
    ExperimentConfig cfg = load(o);
    Mode mode = parse_mode(mode_str);
    BehaviouralData behav = read_behavioural(o, cfg);
    TargetData target = read_target(o, cfg);
    PredictorModel model = load_predictor(path_in(o, "predictor.json"));
    DynamicsModel dyn = load_dynamics(path_in(o, "dynamics.json"));
    WeightedCalibrationSet calib = calibrate(cfg, behav, &target, model, mode, cfg.eps_bias);
    CoverageReport rep = evaluate(cfg, behav, target, model, dyn, calib, mode);

    std::string path = path_in(o, "report.csv");
    bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::app);
    if (fresh) out << report_csv_header() << "\n";
    out << report_csv_row(rep) << "\n";
    std::cout << report_csv_header() << "\n" << report_csv_row(rep) << "\n";
    return 0;
}

int cmd_sweep(const CommonOpts& o) {
    ExperimentConfig cfg = load(o);
    fs::create_directories(o.out_dir);
    Pipeline p = Pipeline::build(cfg);
    std::ofstream out(path_in(o, "sweep.csv"));
    out << report_csv_header() << "\n";
    std::cout << report_csv_header() << "\n";
    for (const CoverageReport& rep : p.sweep()) {
        out << report_csv_row(rep) << "\n";
        std::cout << report_csv_row(rep) << "\n";
    }
    std::cout << "wrote " << path_in(o, "sweep.csv") << "\n";
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& out_path) {
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot open sweep CSV: " + in_path);
    std::string header;
    if (!std::getline(in, header) || header != report_csv_header())
        throw std::runtime_error("unexpected sweep CSV header in " + in_path);
    std::ofstream out(out_path);
    out << report_csv_header() << "\n";
    std::string line;
    long rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out << line << "\n";
        ++rows;
    }
    std::cout << "wrote " << rows << " rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MA-COPP: joint conformal prediction regions for multi-agent trajectories"};
    app.require_subcommand(1);

    CommonOpts gen_o, train_o, cal_o, eval_o, sweep_o;
    std::string cal_mode = "MACOPP_SYNTH";
    std::string eval_mode = "MACOPP_SYNTH";
    std::string report_in = "sweep.csv";
    std::string report_out = "report_long.csv";

    add_common(app.add_subcommand("gen-data", "generate datasets"), gen_o);
    add_common(app.add_subcommand("train", "fit predictor and dynamics models"), train_o);
    auto* cal = app.add_subcommand("calibrate", "build a weighted calibration set");
    add_common(cal, cal_o);
    cal->add_option("--mode", cal_mode, "TT | BT | MACOPP_SYNTH | MACOPP_TRUE");
    auto* ev = app.add_subcommand("evaluate", "evaluate one mode at the configured eps_bias");
    add_common(ev, eval_o);
    ev->add_option("--mode", eval_mode, "TT | BT | MACOPP_SYNTH | MACOPP_TRUE");
    add_common(app.add_subcommand("sweep", "run the eps_bias x mode grid"), sweep_o);
    auto* rp = app.add_subcommand("report", "emit the plot-ready long-format CSV");
    rp->add_option("--in", report_in, "sweep CSV to read");
    rp->add_option("--out-file", report_out, "report CSV to write");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("gen-data")) return cmd_gen_data(gen_o);
        if (app.got_subcommand("train")) return cmd_train(train_o);
        if (app.got_subcommand("calibrate")) return cmd_calibrate(cal_o, cal_mode);
        if (app.got_subcommand("evaluate")) return cmd_evaluate(eval_o, eval_mode);
        if (app.got_subcommand("sweep")) return cmd_sweep(sweep_o);
        if (app.got_subcommand("report")) return cmd_report(report_in, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
