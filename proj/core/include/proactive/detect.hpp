#pragma once

#include "proactive/data.hpp"
#include "proactive/forecaster.hpp"
#include "proactive/matrix.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace proactive {

// ---------------------------------------------------------------------------
// Gaussian mixture with diagonal covariances. Score: log-likelihood.

struct GmmConfig {
    std::size_t components = 4;
    std::uint64_t seed = 0;
    std::size_t max_iter = 200;
    double tol = 1e-6;
};

struct GmmModel {
    std::vector<double> weights; // K
    Matrix means;                // K x D
    Matrix variances;            // K x D, floored
    std::vector<double> log_likelihood_trace; // mean log-likelihood per EM iteration

    std::size_t components() const { return weights.size(); }
    std::size_t dims() const { return means.cols(); }
};

inline constexpr double kGmmVarianceFloor = 1e-6;

/// EM from k-means++ seeds. A component that loses all responsibility is
/// re-seeded at the worst-explained point (up to 3 times, then NumericError);
/// the log-likelihood trace restarts after a re-seed.
GmmModel gmm_fit(const Matrix& train, const GmmConfig& config);

/// log sum_k pi_k N(x; mu_k, diag(var_k)). Higher means more normal.
double gmm_score(const GmmModel& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// Empirical-CDF outlier detector. Score: tail surprise, higher = anomalous.

struct EcodModel {
    std::vector<std::vector<double>> sorted; // per dimension, ascending
    std::vector<double> skewness;            // per dimension

    std::size_t dims() const { return sorted.size(); }
};

EcodModel ecod_fit(const Matrix& train);
double ecod_score(const EcodModel& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// One-class hypersphere on a small bias-free tanh encoder. Score: squared
// distance to the fixed center, higher = anomalous.

struct SvddConfig {
    std::uint64_t seed = 0;
    std::size_t epochs = 50;
    double learning_rate = 1e-3;
    double weight_decay = 1e-4;
    std::size_t batch_size = 64;
    std::size_t hidden = 32;
    std::size_t latent = 8;
};

struct SvddModel {
    std::vector<double> input_mean;  // standardization fitted on training rows
    std::vector<double> input_scale;
    Matrix w1;                       // hidden x D
    Matrix w2;                       // latent x hidden
    std::vector<double> center;      // latent
    double weight_decay = 1e-4;
    std::vector<double> loss_trace;  // mean squared distance per epoch

    std::size_t dims() const { return input_mean.size(); }
    std::vector<double> embed(std::span<const double> x) const;
};

SvddModel svdd_fit(const Matrix& train, const SvddConfig& config);
double svdd_score(const SvddModel& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// Thresholds and the detector union.

enum class DetectorKind { Gmm, Ecod, Svdd };
enum class Orientation { NormalHigh, AnomalyHigh };

std::string_view to_string(DetectorKind kind);
std::string_view to_string(Orientation orientation);
DetectorKind parse_detector_kind(std::string_view s);

Orientation orientation_of(DetectorKind kind);

struct Threshold {
    double value = 0.0;
    Orientation orientation = Orientation::NormalHigh;

    /// A score equal to the threshold is normal.
    bool is_anomaly(double score) const {
        return orientation == Orientation::NormalHigh ? score < value : score > value;
    }
};

/// Training-extreme threshold: the minimum score for normal-high detectors,
/// the maximum for anomaly-high ones.
Threshold calibrate(DetectorKind kind, std::span<const double> train_scores);

struct DetectorConfig {
    DetectorKind kind = DetectorKind::Gmm;
    GmmConfig gmm;
    SvddConfig svdd;
};

class Detector {
public:
    using Model = std::variant<GmmModel, EcodModel, SvddModel>;

    Detector(Model model, Threshold threshold) : model_(std::move(model)), threshold_(threshold) {}

    /// Fits the configured scorer on raw training rows and calibrates the
    /// threshold on the same rows.
    static Detector fit(const Matrix& train, const DetectorConfig& config);

    DetectorKind kind() const;
    std::size_t dims() const;
    const Model& model() const { return model_; }
    const Threshold& threshold() const { return threshold_; }

    double score(std::span<const double> x) const;
    bool is_anomaly(std::span<const double> x) const { return threshold_.is_anomaly(score(x)); }
    std::vector<double> score_rows(const Matrix& rows) const;

    std::string to_json() const;
    static Detector from_json(const std::string& text);

private:
    Model model_;
    Threshold threshold_;
};

inline constexpr int kDetectorFormatVersion = 1;

// ---------------------------------------------------------------------------
// Proactive detection loop.

struct SegmentLatency {
    std::size_t start = 0;
    std::size_t end = 0;              // exclusive
    std::optional<long long> latency; // first flag minus start; negative inside the precursor
};

struct DetectionResult {
    std::size_t offset = 0;       // timestep of scores[0] (the window length)
    std::vector<double> scores;   // one per forecast timestep
    LabelVector flags;
    Threshold threshold;
    std::optional<std::vector<SegmentLatency>> latencies;

    /// Flags aligned to the full series (the first `offset` rows are 0).
    LabelVector aligned_flags() const;
    std::size_t num_flagged() const;
};

struct DetectOptions {
    /// How many steps before a segment a flag still counts as an early
    /// detection of it (never reaching back past the previous segment).
    std::size_t latency_lookback = 10;
};

/// Scores forecast rows (raw space) against the detector.
DetectionResult score_forecasts(const Detector& detector, const RawSeries& forecasts, std::size_t offset);

/// Forecasts each timestep t >= N from observed history, scores the forecast
/// and flags it against the calibrated threshold. Ground-truth values at t
/// never reach the detector. Latencies are filled when labels are present.
DetectionResult proactive_detect(const ForecastModel& model, const Normalizer& normalizer, const Detector& detector,
                                 const RawSeries& test, const DetectOptions& options = {});

std::vector<SegmentLatency> detection_latencies(const LabelVector& flags, const LabelVector& labels,
                                                std::size_t first_scored, std::size_t lookback);

} // namespace proactive
