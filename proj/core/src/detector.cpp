#include "proactive/detect.hpp"
#include "proactive/error.hpp"
#include "proactive/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace proactive {

using nlohmann::json;

std::string_view to_string(DetectorKind kind) {
    switch (kind) {
    case DetectorKind::Gmm: return "gmm";
    case DetectorKind::Ecod: return "ecod";
    case DetectorKind::Svdd: return "svdd";
    }
    return "unknown";
}

std::string_view to_string(Orientation orientation) {
    return orientation == Orientation::NormalHigh ? "normal-high" : "anomaly-high";
}

DetectorKind parse_detector_kind(std::string_view s) {
    if (s == "gmm") return DetectorKind::Gmm;
    if (s == "ecod") return DetectorKind::Ecod;
    if (s == "svdd" || s == "deepsvdd") return DetectorKind::Svdd;
    throw ConfigError("unknown detector kind '" + std::string(s) + "'");
}

Orientation orientation_of(DetectorKind kind) {
    return kind == DetectorKind::Gmm ? Orientation::NormalHigh : Orientation::AnomalyHigh;
}

Threshold calibrate(DetectorKind kind, std::span<const double> train_scores) {
    if (train_scores.empty()) throw DataError("cannot calibrate on an empty score set");
    for (double s : train_scores) {
        if (!std::isfinite(s)) throw NumericError("non-finite training score during calibration");
    }
    const auto orientation = orientation_of(kind);
    const double value = orientation == Orientation::NormalHigh
                             ? *std::min_element(train_scores.begin(), train_scores.end())
                             : *std::max_element(train_scores.begin(), train_scores.end());
    return {value, orientation};
}

Detector Detector::fit(const Matrix& train, const DetectorConfig& config) {
    Model model = [&]() -> Model {
        switch (config.kind) {
        case DetectorKind::Gmm: return gmm_fit(train, config.gmm);
        case DetectorKind::Ecod: return ecod_fit(train);
        case DetectorKind::Svdd: return svdd_fit(train, config.svdd);
        }
        throw ConfigError("unknown detector kind");
    }();
    Detector detector(std::move(model), Threshold{});
    const auto scores = detector.score_rows(train);
    detector.threshold_ = calibrate(config.kind, scores);
    return detector;
}

DetectorKind Detector::kind() const {
    return static_cast<DetectorKind>(model_.index());
}

std::size_t Detector::dims() const {
    return std::visit([](const auto& m) { return m.dims(); }, model_);
}

double Detector::score(std::span<const double> x) const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GmmModel>) return gmm_score(m, x);
            else if constexpr (std::is_same_v<T, EcodModel>) return ecod_score(m, x);
            else return svdd_score(m, x);
        },
        model_);
}

std::vector<double> Detector::score_rows(const Matrix& rows) const {
    if (rows.cols() != dims()) {
        throw DataError("detector expects " + std::to_string(dims()) + " features, got " + std::to_string(rows.cols()));
    }
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = score(rows.row(i));
    return out;
}

namespace {

json matrix_json(const Matrix& m) { return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}}; }

Matrix matrix_from(const json& j) {
    auto rows = j.at("rows").get<std::size_t>();
    auto cols = j.at("cols").get<std::size_t>();
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) throw DataError("matrix payload size mismatch");
    return Matrix(rows, cols, std::move(data));
}

} // namespace

std::string Detector::to_json() const {
    json doc;
    doc["format_version"] = kDetectorFormatVersion;
    doc["kind"] = "detector";
    doc["detector"] = std::string(to_string(kind()));
    doc["threshold"] = {{"value", threshold_.value}, {"orientation", std::string(to_string(threshold_.orientation))}};
    json model;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GmmModel>) {
                model["weights"] = m.weights;
                model["means"] = matrix_json(m.means);
                model["variances"] = matrix_json(m.variances);
                model["log_likelihood_trace"] = m.log_likelihood_trace;
            } else if constexpr (std::is_same_v<T, EcodModel>) {
                model["sorted"] = m.sorted;
                model["skewness"] = m.skewness;
            } else {
                model["input_mean"] = m.input_mean;
                model["input_scale"] = m.input_scale;
                model["w1"] = matrix_json(m.w1);
                model["w2"] = matrix_json(m.w2);
                model["center"] = m.center;
                model["weight_decay"] = m.weight_decay;
                model["loss_trace"] = m.loss_trace;
            }
        },
        model_);
    doc["model"] = std::move(model);
    return doc.dump(1) + "\n";
}

Detector Detector::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("detector file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format_version").get<int>() != kDetectorFormatVersion) {
            throw DataError("unsupported detector format_version");
        }
        if (doc.at("kind").get<std::string>() != "detector") throw DataError("not a detector document");
        const auto kind = parse_detector_kind(doc.at("detector").get<std::string>());
        const auto& jt = doc.at("threshold");
        Threshold threshold{jt.at("value").get<double>(), orientation_of(kind)};
        if (jt.at("orientation").get<std::string>() != to_string(threshold.orientation)) {
            throw DataError("threshold orientation does not match detector kind");
        }
        const auto& jm = doc.at("model");
        switch (kind) {
        case DetectorKind::Gmm: {
            GmmModel m;
            m.weights = jm.at("weights").get<std::vector<double>>();
            m.means = matrix_from(jm.at("means"));
            m.variances = matrix_from(jm.at("variances"));
            m.log_likelihood_trace = jm.at("log_likelihood_trace").get<std::vector<double>>();
            if (m.means.rows() != m.weights.size() || m.variances.rows() != m.weights.size() ||
                m.means.cols() != m.variances.cols()) {
                throw DataError("GMM payload shape mismatch");
            }
            return Detector(std::move(m), threshold);
        }
        case DetectorKind::Ecod: {
            EcodModel m;
            m.sorted = jm.at("sorted").get<std::vector<std::vector<double>>>();
            m.skewness = jm.at("skewness").get<std::vector<double>>();
            if (m.sorted.size() != m.skewness.size()) throw DataError("ECOD payload shape mismatch");
            return Detector(std::move(m), threshold);
        }
        case DetectorKind::Svdd: {
            SvddModel m;
            m.input_mean = jm.at("input_mean").get<std::vector<double>>();
            m.input_scale = jm.at("input_scale").get<std::vector<double>>();
            m.w1 = matrix_from(jm.at("w1"));
            m.w2 = matrix_from(jm.at("w2"));
            m.center = jm.at("center").get<std::vector<double>>();
            m.weight_decay = jm.at("weight_decay").get<double>();
            m.loss_trace = jm.at("loss_trace").get<std::vector<double>>();
            if (m.w1.cols() != m.input_mean.size() || m.w2.cols() != m.w1.rows() || m.center.size() != m.w2.rows()) {
                throw DataError("SVDD payload shape mismatch");
            }
            return Detector(std::move(m), threshold);
        }
        }
        throw DataError("unknown detector kind");
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed detector file: ") + e.what());
    }
}

LabelVector DetectionResult::aligned_flags() const {
    LabelVector out(offset, 0);
    out.insert(out.end(), flags.begin(), flags.end());
    return out;
}

std::size_t DetectionResult::num_flagged() const {
    return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), std::uint8_t{1}));
}

DetectionResult score_forecasts(const Detector& detector, const RawSeries& forecasts, std::size_t offset) {
    DetectionResult result;
    result.offset = offset;
    result.threshold = detector.threshold();
    result.scores = detector.score_rows(forecasts.values);
    result.flags.resize(result.scores.size());
    for (std::size_t i = 0; i < result.scores.size(); ++i) {
        result.flags[i] = result.threshold.is_anomaly(result.scores[i]) ? 1 : 0;
    }
    return result;
}

std::vector<SegmentLatency> detection_latencies(const LabelVector& flags, const LabelVector& labels,
                                                std::size_t first_scored, std::size_t lookback) {
    if (flags.size() != labels.size()) throw DataError("flag and label lengths differ");
    std::vector<SegmentLatency> out;
    std::size_t previous_end = 0;
    for (const auto& seg : segments(labels)) {
        SegmentLatency entry{seg.start, seg.end, std::nullopt};
        const std::size_t reach = seg.start > lookback ? seg.start - lookback : 0;
        for (std::size_t t = std::max({reach, previous_end, first_scored}); t < seg.end; ++t) {
            if (flags[t]) {
                entry.latency = static_cast<long long>(t) - static_cast<long long>(seg.start);
                break;
            }
        }
        out.push_back(entry);
        previous_end = seg.end;
    }
    return out;
}

DetectionResult proactive_detect(const ForecastModel& model, const Normalizer& normalizer, const Detector& detector,
                                 const RawSeries& test, const DetectOptions& options) {
    if (detector.dims() != model.shape.nodes()) {
        throw DataError("detector space has " + std::to_string(detector.dims()) + " features, forecasts have " +
                        std::to_string(model.shape.nodes()));
    }
    const RawSeries forecasts = forecast_series(model, normalizer, test);
    DetectionResult result = score_forecasts(detector, forecasts, model.shape.window);
    if (test.labels) {
        result.latencies = detection_latencies(result.aligned_flags(), *test.labels, result.offset,
                                               options.latency_lookback);
    }
    return result;
}

} // namespace proactive
