// Command-line front end: synth, train, calibrate, detect, eval, spectral, run.

#include "proactive/error.hpp"
#include "proactive/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace proactive;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> iterations;
    std::optional<std::size_t> epochs;
    std::string preset;
    bool clean = false;
    std::string detector_kind;
    std::string model;
    std::string detector;
    std::string pred;
    std::string labels;
};

PipelineConfig load_config(const Options& opt) {
    PipelineConfig cfg = opt.config.empty() ? PipelineConfig{} : PipelineConfig::load(opt.config);
    cfg.apply_environment();
    cfg.validate();
    return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

fs::path or_default(const std::string& given, const fs::path& fallback) {
    return given.empty() ? fallback : fs::path(given);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proactive forecast-then-threshold anomaly detection"};
    app.require_subcommand(1);
    Options opt;

    auto add_config = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("-c,--config", opt.config, "Pipeline config (JSON)");
        if (required) o->required();
    };

    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
    add_config(synth, false);
    synth->add_option("--seed", opt.seed, "Generator seed");
    synth->add_option("--preset", opt.preset, "Shape preset: msl, smap, smd, psm");
    synth->add_flag("--clean", opt.clean, "Do not inject anomalies");

    auto* train = app.add_subcommand("train", "Train the forecaster");
    add_config(train, true);
    train->add_option("--seed", opt.seed, "Training seed");
    train->add_option("--iterations", opt.iterations, "Number of Adam updates");
    train->add_option("--epochs", opt.epochs, "Passes over the data when iterations is unset");

    auto* calibrate = app.add_subcommand("calibrate", "Fit a detector and its threshold on training rows");
    add_config(calibrate, true);
    calibrate->add_option("--model", opt.model, "Model file (default: <output_dir>/model.json)");
    calibrate->add_option("--kind", opt.detector_kind, "Detector: gmm, ecod, svdd");

    auto* detect = app.add_subcommand("detect", "Score forecasts of the test series");
    add_config(detect, true);
    detect->add_option("--model", opt.model, "Model file (default: <output_dir>/model.json)");
    detect->add_option("--detector", opt.detector, "Detector file (default: <output_dir>/detector.json)");

    auto* eval = app.add_subcommand("eval", "Compute the metric report for 0/1 predictions");
    add_config(eval, false);
    eval->add_option("--pred", opt.pred, "Prediction column (default: <output_dir>/pred.csv)");
    eval->add_option("--labels", opt.labels, "Label column (default: configured labels)");

    auto* spectral = app.add_subcommand("spectral", "Fourier convex-hull forecastability analysis");
    add_config(spectral, true);

    auto* run = app.add_subcommand("run", "Train, calibrate, detect, evaluate and analyse in one go");
    add_config(run, true);
    run->add_option("--iterations", opt.iterations, "Number of Adam updates");
    run->add_option("--kind", opt.detector_kind, "Detector: gmm, ecod, svdd");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        auto cfg = load_config(opt);
        if (opt.iterations) cfg.train.iterations = *opt.iterations;
        if (opt.epochs) cfg.train.epochs = *opt.epochs;
        if (!opt.detector_kind.empty()) cfg.detector.kind = parse_detector_kind(opt.detector_kind);

        if (synth->parsed()) {
            if (!opt.preset.empty()) cfg.synth = SynthConfig::preset(opt.preset);
            if (opt.seed) cfg.synth_seed = *opt.seed;
            if (opt.clean) cfg.synth.inject_anomalies = false;
            cmd_synth(cfg);
            std::cout << "wrote " << cfg.train_path().string() << ", " << cfg.test_path().string() << ", "
                      << cfg.labels_path().string() << ", " << cfg.schema_path().string() << "\n";
        } else if (train->parsed()) {
            if (opt.seed) cfg.train.seed = *opt.seed;
            cfg.validate();
            const auto s = cmd_train(cfg);
            std::cout << "iterations " << s.iterations << "\n"
                      << "final loss_C " << s.final.continuous << "\n"
                      << "final loss_D " << s.final.discrete << "\n";
        } else if (calibrate->parsed()) {
            const auto d = cmd_calibrate(cfg, or_default(opt.model, cfg.output("model.json")));
            std::cout << "threshold " << d.threshold().value << " (" << to_string(d.threshold().orientation)
                      << ")\n";
        } else if (detect->parsed()) {
            const auto s = cmd_detect(cfg, or_default(opt.model, cfg.output("model.json")),
                                      or_default(opt.detector, cfg.output("detector.json")));
            std::cout << s.report_json;
        } else if (eval->parsed()) {
            const auto report = cmd_eval(or_default(opt.pred, cfg.output("pred.csv")),
                                         or_default(opt.labels, cfg.labels_path()));
            write_file(cfg.output("metrics.json"), report);
            std::cout << report;
        } else if (spectral->parsed()) {
            const auto r = cmd_spectral(cfg);
            std::cout << hull_report_to_json(r, cfg.spectral);
        } else if (run->parsed()) {
            std::cout << cmd_run(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
