#include "proactive/pipeline.hpp"

#include "proactive/error.hpp"
#include "text_io.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

namespace proactive {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Reads typed keys from one JSON object and rejects keys nobody asked for.
class Block {
public:
    Block(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json* raw(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <class T>
    void get(const char* key, T& out) {
        const json* v = raw(key);
        if (v == nullptr) return;
        const auto where = [&] { return "'" + name_ + "." + key + "'"; };
        if constexpr (std::is_same_v<T, bool>) {
            if (!v->is_boolean()) throw ConfigError(where() + " must be a boolean");
            out = v->get<bool>();
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v->is_number_unsigned()) throw ConfigError(where() + " must be a non-negative integer");
            out = v->get<T>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v->is_number()) throw ConfigError(where() + " must be a number");
            out = v->get<T>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v->is_string()) throw ConfigError(where() + " must be a string");
            out = v->get<std::string>();
        } else {
            static_assert(std::is_same_v<T, std::vector<std::size_t>>);
            if (!v->is_array()) throw ConfigError(where() + " must be an array");
            out.clear();
            for (const auto& item : *v) {
                if (!item.is_number_unsigned()) throw ConfigError(where() + " must hold non-negative integers");
                out.push_back(item.get<std::size_t>());
            }
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) throw ConfigError("unknown key '" + key + "' in '" + name_ + "'");
        }
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json loss_json(const LossParts& l) {
    return {{"continuous", l.continuous}, {"discrete", l.discrete}, {"total", l.total}};
}

json threshold_json(const Threshold& t) {
    return {{"value", t.value}, {"orientation", std::string(to_string(t.orientation))}};
}

json hull_json(const HullReport& report, const SpectralOptions& options) {
    json features = json::array();
    for (const auto& f : report.features) {
        features.push_back({{"feature", f.feature},
                            {"train_samples", f.train_samples},
                            {"anomaly_samples", f.anomaly_samples},
                            {"superset_equal", f.superset_equal},
                            {"outside", f.outside},
                            {"outside_fraction", f.outside_fraction}});
    }
    return {{"format_version", kReportFormatVersion},
            {"kind", "hull_report"},
            {"segment_length", options.segment_length},
            {"epsilon", options.epsilon},
            {"features", features},
            {"total_anomaly_samples", report.total_anomaly_samples},
            {"total_outside", report.total_outside},
            {"pooled_outside_fraction", report.pooled_outside_fraction}};
}

json metric_json(const MetricReport& r) {
    return {{"format_version", kReportFormatVersion},
            {"kind", "metric_report"},
            {"f1_at_k", r.f1_at_k},
            {"f1_composite", r.f1_composite},
            {"f1_range", r.f1_range},
            {"point_f1", r.point_f1},
            {"point_precision", r.point_precision},
            {"point_recall", r.point_recall},
            {"f1_curve", r.f1_curve}};
}

json detection_json(const DetectionResult& result, DetectorKind kind) {
    json latencies = nullptr;
    std::size_t early = 0;
    if (result.latencies) {
        latencies = json::array();
        for (const auto& l : *result.latencies) {
            json entry = {{"start", l.start}, {"end", l.end}, {"latency", nullptr}};
            if (l.latency) {
                entry["latency"] = *l.latency;
                if (*l.latency <= 0) ++early;
            }
            latencies.push_back(std::move(entry));
        }
    }
    return {{"format_version", kReportFormatVersion},
            {"kind", "detection_report"},
            {"detector", std::string(to_string(kind))},
            {"threshold", threshold_json(result.threshold)},
            {"offset", result.offset},
            {"scored", result.scores.size()},
            {"flagged", result.num_flagged()},
            {"latencies", latencies},
            {"early_detections", result.latencies ? json(early) : json(nullptr)}};
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

RawSeries load_train(const PipelineConfig& config) {
    return load_csv(config.train_path(), load_schema(config.schema_path()));
}

/// Labels are only attached when `with_labels` is set and the file exists.
RawSeries load_test(const PipelineConfig& config, bool with_labels) {
    const auto schema = load_schema(config.schema_path());
    std::optional<fs::path> labels;
    if (with_labels && fs::exists(config.labels_path())) labels = config.labels_path();
    return load_csv(config.test_path(), schema, labels);
}

std::string labels_csv(const LabelVector& labels) {
    std::string out;
    out.reserve(labels.size() * 2);
    for (auto v : labels) {
        out += v ? '1' : '0';
        out += '\n';
    }
    return out;
}

void write_hull_points(const std::vector<HullPoint>& points, std::size_t bins, const fs::path& path) {
    std::ostringstream out;
    out << "feature,segment_end_index,inside";
    for (std::size_t k = 0; k < bins; ++k) out << ",a" << k + 1;
    out << '\n';
    for (const auto& p : points) {
        out << p.feature << ',' << p.end_index << ',' << (p.inside ? 1 : 0);
        for (double m : p.magnitudes) out << ',' << detail::format_double(m);
        out << '\n';
    }
    detail::write_text_file(path, out.str());
}

} // namespace

// ---------------------------------------------------------------------------
// Configuration

PipelineConfig PipelineConfig::parse(const std::string& json_text, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    PipelineConfig cfg;
    Block root(doc, "config");

    std::string out = "out";
    root.get("output_dir", out);
    cfg.output_dir = resolve(base_dir, out);

    if (const json* j = root.raw("data")) {
        Block b(*j, "data");
        std::string p;
        auto path = [&](const char* key, fs::path& dst) {
            p.clear();
            b.get(key, p);
            if (!p.empty()) dst = resolve(base_dir, p);
        };
        path("train", cfg.data.train);
        path("test", cfg.data.test);
        path("labels", cfg.data.labels);
        path("schema", cfg.data.schema);
        b.finish();
    }

    root.get("window", cfg.window);
    root.get("horizon", cfg.horizon);

    if (const json* j = root.raw("train")) {
        Block b(*j, "train");
        auto& t = cfg.train;
        b.get("learning_rate", t.learning_rate);
        b.get("beta1", t.beta1);
        b.get("beta2", t.beta2);
        b.get("epsilon", t.epsilon);
        b.get("lambda", t.lambda);
        if (const json* it = b.raw("iterations"); it != nullptr && !it->is_null()) {
            if (!it->is_number_unsigned()) throw ConfigError("'train.iterations' must be a non-negative integer");
            t.iterations = it->get<std::size_t>();
        }
        b.get("epochs", t.epochs);
        b.get("batch_size", t.batch_size);
        b.get("seed", t.seed);
        b.get("kernel_size", t.kernel_size);
        b.get("hidden", t.hidden);
        b.get("node_dim", t.node_dim);
        std::string s;
        b.get("activation", s);
        if (!s.empty()) t.activation = parse_activation(s);
        s.clear();
        b.get("head_mode", s);
        if (!s.empty()) t.head_mode = parse_head_mode(s);
        b.finish();
    }

    if (const json* j = root.raw("detector")) {
        Block b(*j, "detector");
        auto& d = cfg.detector;
        std::string kind;
        b.get("kind", kind);
        if (!kind.empty()) d.kind = parse_detector_kind(kind);
        b.get("components", d.gmm.components);
        std::uint64_t seed = 0;
        if (b.has("seed")) {
            b.get("seed", seed);
            d.gmm.seed = seed;
            d.svdd.seed = seed;
        }
        b.get("max_iter", d.gmm.max_iter);
        b.get("tol", d.gmm.tol);
        b.get("latency_lookback", cfg.detect.latency_lookback);
        if (const json* sj = b.raw("svdd")) {
            Block sb(*sj, "detector.svdd");
            sb.get("epochs", d.svdd.epochs);
            sb.get("learning_rate", d.svdd.learning_rate);
            sb.get("weight_decay", d.svdd.weight_decay);
            sb.get("batch_size", d.svdd.batch_size);
            sb.get("hidden", d.svdd.hidden);
            sb.get("latent", d.svdd.latent);
            sb.finish();
        }
        b.finish();
    }

    if (const json* j = root.raw("metrics")) {
        Block b(*j, "metrics");
        b.finish();
    }

    if (const json* j = root.raw("spectral")) {
        Block b(*j, "spectral");
        b.get("segment_length", cfg.spectral.segment_length);
        b.get("epsilon", cfg.spectral.epsilon);
        b.get("tolerance", cfg.spectral.tolerance);
        b.finish();
    }

    if (const json* j = root.raw("synth")) {
        Block b(*j, "synth");
        std::string preset;
        b.get("preset", preset);
        if (!preset.empty()) cfg.synth = SynthConfig::preset(preset);
        auto& s = cfg.synth;
        b.get("seed", cfg.synth_seed);
        b.get("continuous", s.continuous);
        b.get("discrete_cardinalities", s.discrete_cardinalities);
        b.get("embedding_dim", s.embedding_dim);
        b.get("train_length", s.train_length);
        b.get("test_length", s.test_length);
        b.get("period", s.period);
        b.get("amplitude", s.amplitude);
        b.get("noise", s.noise);
        b.get("trend_amplitude", s.trend_amplitude);
        b.get("trend_period", s.trend_period);
        b.get("discrete_stay", s.discrete_stay);
        b.get("anomaly_count", s.anomaly_count);
        b.get("anomaly_length", s.anomaly_length);
        b.get("anomaly_magnitude", s.anomaly_magnitude);
        b.get("precursor_length", s.precursor_length);
        b.get("precursor_scale", s.precursor_scale);
        b.get("anomaly_margin", s.anomaly_margin);
        b.get("inject_anomalies", s.inject_anomalies);
        b.finish();
    }

    root.finish();
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
    const auto text = detail::read_text_file(path, true);
    auto base = path.parent_path();
    if (base.empty()) base = ".";
    return parse(text, base);
}

void PipelineConfig::apply_environment() {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') output_dir = dir;
}

void PipelineConfig::validate() const {
    if (window == 0) throw ConfigError("window must be positive");
    if (horizon != 1) throw ConfigError("horizon must be 1");
    train.validate(window);
    if (train.hidden == 0 || train.node_dim == 0) throw ConfigError("hidden and node_dim must be positive");
    if (detector.gmm.components == 0) throw ConfigError("detector.components must be positive");
    if (detector.gmm.max_iter == 0) throw ConfigError("detector.max_iter must be positive");
    if (!(detector.gmm.tol >= 0.0)) throw ConfigError("detector.tol must be non-negative");
    if (detector.svdd.epochs == 0 || detector.svdd.batch_size == 0) {
        throw ConfigError("detector.svdd epochs and batch_size must be positive");
    }
    if (!(detector.svdd.learning_rate > 0.0)) throw ConfigError("detector.svdd.learning_rate must be positive");
    if (spectral.segment_length < 2) throw ConfigError("spectral.segment_length must be at least 2");
    if (!(spectral.epsilon >= 0.0)) throw ConfigError("spectral.epsilon must be non-negative");
    if (!(spectral.tolerance > 0.0)) throw ConfigError("spectral.tolerance must be positive");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

fs::path PipelineConfig::train_path() const { return data.train.empty() ? output("train.csv") : data.train; }
fs::path PipelineConfig::test_path() const { return data.test.empty() ? output("test.csv") : data.test; }
fs::path PipelineConfig::labels_path() const { return data.labels.empty() ? output("labels.csv") : data.labels; }
fs::path PipelineConfig::schema_path() const { return data.schema.empty() ? output("schema.json") : data.schema; }

std::string PipelineConfig::to_json() const {
    json t = {{"learning_rate", train.learning_rate},
              {"beta1", train.beta1},
              {"beta2", train.beta2},
              {"epsilon", train.epsilon},
              {"lambda", train.lambda},
              {"iterations", train.iterations ? json(*train.iterations) : json(nullptr)},
              {"epochs", train.epochs},
              {"batch_size", train.batch_size},
              {"seed", train.seed},
              {"kernel_size", train.kernel_size},
              {"activation", std::string(to_string(train.activation))},
              {"hidden", train.hidden},
              {"node_dim", train.node_dim},
              {"head_mode", std::string(to_string(train.head_mode))}};
    json d = {{"kind", std::string(to_string(detector.kind))},
              {"components", detector.gmm.components},
              {"seed", detector.gmm.seed},
              {"max_iter", detector.gmm.max_iter},
              {"tol", detector.gmm.tol},
              {"latency_lookback", detect.latency_lookback},
              {"svdd",
               {{"epochs", detector.svdd.epochs},
                {"learning_rate", detector.svdd.learning_rate},
                {"weight_decay", detector.svdd.weight_decay},
                {"batch_size", detector.svdd.batch_size},
                {"hidden", detector.svdd.hidden},
                {"latent", detector.svdd.latent}}}};
    json s = {{"seed", synth_seed},
              {"continuous", synth.continuous},
              {"discrete_cardinalities", synth.discrete_cardinalities},
              {"embedding_dim", synth.embedding_dim},
              {"train_length", synth.train_length},
              {"test_length", synth.test_length},
              {"period", synth.period},
              {"amplitude", synth.amplitude},
              {"noise", synth.noise},
              {"trend_amplitude", synth.trend_amplitude},
              {"trend_period", synth.trend_period},
              {"discrete_stay", synth.discrete_stay},
              {"anomaly_count", synth.anomaly_count},
              {"anomaly_length", synth.anomaly_length},
              {"anomaly_magnitude", synth.anomaly_magnitude},
              {"precursor_length", synth.precursor_length},
              {"precursor_scale", synth.precursor_scale},
              {"anomaly_margin", synth.anomaly_margin},
              {"inject_anomalies", synth.inject_anomalies}};
    json doc = {{"data",
                 {{"train", train_path().string()},
                  {"test", test_path().string()},
                  {"labels", labels_path().string()},
                  {"schema", schema_path().string()}}},
                {"window", window},
                {"horizon", horizon},
                {"train", t},
                {"detector", d},
                {"metrics", json::object()},
                {"spectral",
                 {{"segment_length", spectral.segment_length},
                  {"epsilon", spectral.epsilon},
                  {"tolerance", spectral.tolerance}}},
                {"synth", s},
                {"output_dir", output_dir.string()}};
    return dump(doc);
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_synth(const PipelineConfig& config) {
    const auto data = synth_generate(config.synth, config.synth_seed);
    save_schema(data.train.schema, config.schema_path());
    save_csv(data.train, config.train_path());
    save_csv(data.test, config.test_path());
    save_labels(*data.test.labels, config.labels_path());
}

TrainSummary cmd_train(const PipelineConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto raw = load_train(config);
    const auto normalizer = Normalizer::fit(raw);
    const auto windows = make_windows(normalizer.apply(raw), config.window);
    auto result = train(windows, raw.schema, config.train);

    TrainSummary summary;
    summary.iterations = result.trace.size();
    summary.final = evaluate(result.model, windows, config.train.lambda);
    summary.initial = result.trace.empty() ? summary.final : result.trace.front();

    std::ostringstream trace;
    trace << "iteration,loss_continuous,loss_discrete,loss_total\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const auto& l = result.trace[i];
        trace << i << ',' << detail::format_double(l.continuous) << ',' << detail::format_double(l.discrete) << ','
              << detail::format_double(l.total) << '\n';
    }
    detail::write_text_file(config.output("loss_trace.csv"), trace.str());
    detail::write_text_file(config.output("model.json"), model_to_json(result.model, normalizer));
    summary.seconds = seconds_since(start);
    return summary;
}

Detector cmd_calibrate(const PipelineConfig& config, const fs::path& model_path) {
    const auto raw = load_train(config);
    const auto [model, normalizer] = model_from_json(detail::read_text_file(model_path));
    if (model.shape.nodes() != raw.schema.num_features()) {
        throw DataError("model feature count does not match the training data");
    }
    auto detector = Detector::fit(raw.values, config.detector);
    detail::write_text_file(config.output("detector.json"), detector.to_json());
    return detector;
}

DetectSummary cmd_detect(const PipelineConfig& config, const fs::path& model_path, const fs::path& detector_path) {
    const auto start = std::chrono::steady_clock::now();
    const auto [model, normalizer] = model_from_json(detail::read_text_file(model_path));
    const auto detector = Detector::from_json(detail::read_text_file(detector_path));
    const auto test = load_test(config, false);
    if (detector.dims() != test.schema.num_features()) {
        throw DataError("detector dimension does not match the test data");
    }

    DetectSummary summary;
    summary.result = proactive_detect(model, normalizer, detector, test, config.detect);
    auto& r = summary.result;
    if (fs::exists(config.labels_path())) {
        const auto labels = load_labels(config.labels_path());
        if (labels.size() != test.timesteps()) throw DataError("label length does not match the test series");
        r.latencies = detection_latencies(r.aligned_flags(), labels, r.offset, config.detect.latency_lookback);
    }

    std::ostringstream scores;
    scores << "t,score,flag\n";
    for (std::size_t i = 0; i < r.scores.size(); ++i) {
        scores << r.offset + i << ',' << detail::format_double(r.scores[i]) << ',' << (r.flags[i] ? 1 : 0) << '\n';
    }
    detail::write_text_file(config.output("scores.csv"), scores.str());
    detail::write_text_file(config.output("flags.csv"), labels_csv(r.flags));
    detail::write_text_file(config.output("pred.csv"), labels_csv(r.aligned_flags()));
    summary.report_json = detection_report_to_json(r, detector.kind());
    detail::write_text_file(config.output("detect_report.json"), summary.report_json);
    summary.seconds = seconds_since(start);
    return summary;
}

std::string cmd_eval(const fs::path& pred_path, const fs::path& labels_path) {
    const auto pred = load_labels(pred_path);
    const auto truth = load_labels(labels_path);
    if (pred.size() != truth.size()) {
        throw DataError("prediction length " + std::to_string(pred.size()) + " does not match label length " +
                        std::to_string(truth.size()));
    }
    return metric_report_to_json(evaluate_metrics(pred, truth));
}

HullReport cmd_spectral(const PipelineConfig& config) {
    const auto train_series = load_train(config);
    const auto test = load_test(config, true);
    if (!test.labels) throw DataError("spectral analysis needs the labels file");
    auto report = forecastability_report(train_series, test, config.spectral);
    const std::size_t bins = config.spectral.segment_length / 2 + 1;
    detail::write_text_file(config.output("spectral_report.json"), hull_report_to_json(report, config.spectral));
    write_hull_points(report.anomaly_points, bins, config.output("spectral_plot.csv"));
    write_hull_points(report.train_points, bins, config.output("spectral_train.csv"));
    return report;
}

std::string cmd_run(const PipelineConfig& config) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    json timings;

    const auto trained = cmd_train(config);
    timings["train"] = trained.seconds;

    auto t0 = clock::now();
    const auto detector = cmd_calibrate(config, config.output("model.json"));
    timings["calibrate"] = seconds_since(t0);

    const auto detected = cmd_detect(config, config.output("model.json"), config.output("detector.json"));
    timings["detect"] = detected.seconds;

    const auto train_series = load_train(config);
    const auto test = load_test(config, true);
    const bool has_anomalies =
        test.labels && std::any_of(test.labels->begin(), test.labels->end(), [](auto v) { return v != 0; });

    json metrics = nullptr;
    json spectral = nullptr;
    t0 = clock::now();
    if (has_anomalies) {
        metrics = json::parse(cmd_eval(config.output("pred.csv"), config.labels_path()));
        detail::write_text_file(config.output("metrics.json"), dump(metrics));
    }
    timings["eval"] = seconds_since(t0);
    t0 = clock::now();
    if (has_anomalies) spectral = hull_json(cmd_spectral(config), config.spectral);
    timings["spectral"] = seconds_since(t0);
    timings["total"] = seconds_since(start);

    double ratio = 0.0;
    if (test.labels && !test.labels->empty()) {
        std::size_t ones = 0;
        for (auto v : *test.labels) ones += v ? 1 : 0;
        ratio = static_cast<double>(ones) / static_cast<double>(test.labels->size());
    }

    json doc = {{"format_version", kReportFormatVersion},
                {"kind", "run_report"},
                {"config", json::parse(config.to_json())},
                {"data",
                 {{"train_timesteps", train_series.timesteps()},
                  {"test_timesteps", test.timesteps()},
                  {"continuous", train_series.schema.num_continuous()},
                  {"discrete", train_series.schema.num_discrete()},
                  {"anomaly_ratio", ratio}}},
                {"training",
                 {{"iterations", trained.iterations},
                  {"initial_loss", loss_json(trained.initial)},
                  {"final_loss", loss_json(trained.final)}}},
                {"threshold", threshold_json(detector.threshold())},
                {"detection", json::parse(detected.report_json)},
                {"metrics", metrics},
                {"spectral", spectral},
                {"timings", timings}};
    const auto text = dump(doc);
    detail::write_text_file(config.output("run_report.json"), text);
    return text;
}

// ---------------------------------------------------------------------------
// Reports

std::string metric_report_to_json(const MetricReport& report) { return dump(metric_json(report)); }

std::string hull_report_to_json(const HullReport& report, const SpectralOptions& options) {
    return dump(hull_json(report, options));
}

std::string detection_report_to_json(const DetectionResult& result, DetectorKind kind) {
    return dump(detection_json(result, kind));
}

const std::vector<std::string>& report_fields(std::string_view kind) {
    static const std::map<std::string, std::vector<std::string>, std::less<>> fields = {
        {"metric_report",
         {"format_version", "kind", "f1_at_k", "f1_composite", "f1_range", "point_f1", "point_precision",
          "point_recall", "f1_curve"}},
        {"hull_report",
         {"format_version", "kind", "segment_length", "epsilon", "features", "total_anomaly_samples",
          "total_outside", "pooled_outside_fraction"}},
        {"detection_report",
         {"format_version", "kind", "detector", "threshold", "offset", "scored", "flagged", "latencies",
          "early_detections"}},
        {"run_report",
         {"format_version", "kind", "config", "data", "training", "threshold", "detection", "metrics", "spectral",
          "timings"}},
        {"forecast_model", {"format_version", "kind", "shape", "normalizer", "tensors"}},
        {"detector", {"format_version", "kind", "detector", "threshold", "model"}},
    };
    const auto it = fields.find(kind);
    if (it == fields.end()) throw DataError("unknown report kind '" + std::string(kind) + "'");
    return it->second;
}

namespace {

void validate_document(const json& doc, const std::string& where) {
    if (!doc.is_object()) throw DataError(where + ": report must be a JSON object");
    if (!doc.contains("kind") || !doc["kind"].is_string()) throw DataError(where + ": missing field 'kind'");
    const auto& fields = report_fields(doc["kind"].get<std::string>());
    for (const auto& f : fields) {
        if (!doc.contains(f)) throw DataError(where + ": missing field '" + f + "'");
    }
    if (!doc["format_version"].is_number_integer()) throw DataError(where + ": format_version must be an integer");
    for (const auto& [key, value] : doc.items()) {
        if (value.is_object() && value.contains("kind") && value.contains("format_version")) {
            validate_document(value, where + "." + key);
        }
    }
}

} // namespace

void validate_report_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DataError(std::string("report is not valid JSON: ") + e.what());
    }
    validate_document(doc, "report");
}

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const ConfigError*>(&error) != nullptr) return 2;
    if (dynamic_cast<const DataError*>(&error) != nullptr) return 3;
    if (dynamic_cast<const NumericError*>(&error) != nullptr) return 4;
    return 1;
}

} // namespace proactive
