#pragma once

#include "proactive/detect.hpp"
#include "proactive/metrics.hpp"
#include "proactive/spectral.hpp"
#include "proactive/synth.hpp"
#include "proactive/training.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace proactive {

inline constexpr int kReportFormatVersion = 1;

/// Environment variable that overrides `output_dir` from the config file.
inline constexpr const char* kOutputDirEnv = "PROACTIVE_OUTPUT_DIR";

/// Everything a pipeline run needs. Relative paths in a config file resolve
/// against the directory containing that file; data paths left unset default
/// to the files `synth` writes into the output directory.
struct PipelineConfig {
    struct DataPaths {
        std::filesystem::path train;
        std::filesystem::path test;
        std::filesystem::path labels;
        std::filesystem::path schema;
    };

    DataPaths data;
    std::size_t window = 5;
    std::size_t horizon = 1;
    TrainConfig train;
    DetectorConfig detector;
    DetectOptions detect;
    SpectralOptions spectral;
    SynthConfig synth;
    std::uint64_t synth_seed = 0;
    std::filesystem::path output_dir = "out";

    /// Throws ConfigError on unknown keys, wrong types or invalid values.
    static PipelineConfig parse(const std::string& json_text, const std::filesystem::path& base_dir = ".");
    static PipelineConfig load(const std::filesystem::path& path);

    /// Applies the output-directory environment override, if set.
    void apply_environment();

    void validate() const;

    std::filesystem::path train_path() const;
    std::filesystem::path test_path() const;
    std::filesystem::path labels_path() const;
    std::filesystem::path schema_path() const;
    std::filesystem::path output(const std::string& name) const { return output_dir / name; }

    /// JSON echo of the effective configuration.
    std::string to_json() const;
};

struct TrainSummary {
    std::size_t iterations = 0;
    LossParts initial;
    LossParts final;
    double seconds = 0.0;
};

struct DetectSummary {
    DetectionResult result;
    std::string report_json;
    double seconds = 0.0;
};

/// Writes train.csv, test.csv, labels.csv and schema.json.
void cmd_synth(const PipelineConfig& config);

/// Writes model.json and loss_trace.csv.
TrainSummary cmd_train(const PipelineConfig& config);

/// Fits the detector on raw training rows and writes detector.json.
Detector cmd_calibrate(const PipelineConfig& config, const std::filesystem::path& model_path);

/// Writes scores.csv (t,score,flag), flags.csv (one row per scored step),
/// pred.csv (flags aligned to the full test series) and detect_report.json.
/// Labels are read only for the latency summary.
DetectSummary cmd_detect(const PipelineConfig& config, const std::filesystem::path& model_path,
                         const std::filesystem::path& detector_path);

/// Metric report JSON for two 0/1 columns.
std::string cmd_eval(const std::filesystem::path& pred_path, const std::filesystem::path& labels_path);

/// Writes spectral_report.json, spectral_plot.csv and spectral_train.csv;
/// returns the report.
HullReport cmd_spectral(const PipelineConfig& config);

/// Full pipeline (train, calibrate, detect, eval, spectral) plus run_report.json.
std::string cmd_run(const PipelineConfig& config);

std::string metric_report_to_json(const MetricReport& report);
std::string hull_report_to_json(const HullReport& report, const SpectralOptions& options);
std::string detection_report_to_json(const DetectionResult& result, DetectorKind kind);

/// Required top-level fields of each emitted document, keyed by its "kind".
const std::vector<std::string>& report_fields(std::string_view kind);

/// Throws DataError naming the first missing field.
void validate_report_json(const std::string& json_text);

/// Maps an exception to the CLI exit code: 2 config, 3 data, 4 numeric, 1 other.
int exit_code_for(const std::exception& error);

} // namespace proactive
