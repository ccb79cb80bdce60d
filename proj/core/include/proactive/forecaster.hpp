#pragma once

#include "proactive/data.hpp"
#include "proactive/matrix.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace proactive {

enum class Activation { Tanh, Relu };

/// How the trend/seasonal heads map the time axis to the next step.
/// Shared: one N->1 map reused by every continuous channel.
/// Full: an (N*c)->c map that mixes channels.
enum class HeadMode { Shared, Full };

std::string_view to_string(Activation a);
std::string_view to_string(HeadMode m);
Activation parse_activation(std::string_view s);
HeadMode parse_head_mode(std::string_view s);

struct ModelShape {
    std::size_t continuous = 0;  // c
    std::size_t discrete = 0;    // d
    std::size_t embedding = 1;   // e, one-hot width
    std::size_t hidden = 256;    // h
    std::size_t node_dim = 10;   // b, node-embedding width
    std::size_t window = 5;      // N
    std::size_t kernel = 3;      // moving-average width, odd
    std::vector<std::size_t> cardinalities;
    Activation activation = Activation::Tanh;
    HeadMode head_mode = HeadMode::Shared;

    std::size_t nodes() const { return continuous + discrete; }
    std::size_t node_input() const { return embedding * window; }

    /// Throws ConfigError on inconsistent dimensions.
    void validate() const;

    bool operator==(const ModelShape&) const = default;
};

ModelShape make_shape(const FeatureSchema& schema, std::size_t window, std::size_t hidden, std::size_t node_dim,
                      std::size_t kernel, Activation activation = Activation::Tanh,
                      HeadMode head_mode = HeadMode::Shared);

/// Every trainable tensor, stored flat. The same struct doubles as a
/// gradient container and as an Adam moment accumulator.
///
/// Layouts:
///   trend_w, seasonal_w   shared: [N]; full: [c][N*c] (input index t*c + j)
///   trend_b, seasonal_b   shared: [1]; full: [c]
///   discrete_w [N], discrete_b [1]       (empty when d = 0)
///   node_embedding [(c+d)][b]
///   agc_weight     [b][h][e]
///   input_w        [h][e*N]             (input index slot*N + t)
///   input_b        [h]
struct ForecastParams {
    std::vector<double> trend_w, trend_b;
    std::vector<double> seasonal_w, seasonal_b;
    std::vector<double> discrete_w, discrete_b;
    std::vector<double> node_embedding;
    std::vector<double> agc_weight;
    std::vector<double> input_w, input_b;

    static ForecastParams zeros(const ModelShape& shape);

    /// Visits (name, tensor) pairs in a fixed order.
    void for_each(const std::function<void(std::string_view, std::vector<double>&)>& fn);
    void for_each(const std::function<void(std::string_view, const std::vector<double>&)>& fn) const;

    bool operator==(const ForecastParams&) const = default;
};

struct ForecastModel {
    ModelShape shape;
    ForecastParams params;

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases,
    /// Normal(0, 0.1) node embeddings, all drawn from `seed`.
    static ForecastModel initialize(const ModelShape& shape, std::uint64_t seed);

    bool operator==(const ForecastModel&) const = default;
};

struct Forecast {
    std::vector<double> continuous;         // c
    Matrix discrete_logits;                 // d x e
    std::vector<std::size_t> discrete_codes; // argmax over the first cardinality(j) logits
};

struct LossParts {
    double continuous = 0.0;
    double discrete = 0.0;
    double total = 0.0;
};

/// Moving-average trend (edge-replicated padding) and the seasonal residual.
/// `block` is N x c.
std::pair<Matrix, Matrix> decompose(const Matrix& block, std::size_t kernel);

/// One-hot expansion of the discrete columns of a window: N x d x e.
Tensor3 window_one_hot(const ModelShape& shape, const Matrix& window);

/// Trend head plus seasonal head, without the graph correction.
std::vector<double> predict_continuous(const ForecastModel& model, const Matrix& window);

/// Discrete head logits (d x e), without the graph correction.
Matrix predict_discrete(const ForecastModel& model, const Tensor3& one_hot_window);

/// I + rowwise softmax(ReLU(E E^T)).
Matrix adjacency(const Matrix& node_embedding);

/// Adaptive graph convolution output Z, (c+d) x e.
Matrix agc(const ForecastModel& model, const Matrix& window);

Forecast forward(const ForecastModel& model, const Matrix& window);

/// MSE over continuous outputs plus lambda times the mean cross-entropy over
/// discrete outputs. Log-probabilities are clamped at -50.
LossParts loss(const ModelShape& shape, const Forecast& forecast, std::span<const double> target, double lambda);

/// Adds scale * d(total)/d(param) into `grads` and returns the loss.
/// Throws NumericError naming the tensor when a non-finite value appears.
LossParts accumulate_gradients(const ForecastModel& model, const Matrix& window, std::span<const double> target,
                               double lambda, ForecastParams& grads, double scale = 1.0);

/// Exact gradient of the total loss for a single (window, target) pair.
std::pair<LossParts, ForecastParams> gradients(const ForecastModel& model, const Matrix& window,
                                               std::span<const double> target, double lambda);

/// Rolling one-step forecasts for rows N..T-1 of `series` (raw units),
/// each conditioned on the observed rows before it. Continuous outputs are
/// mapped back to raw units; discrete outputs become integer codes.
RawSeries forecast_series(const ForecastModel& model, const Normalizer& normalizer, const RawSeries& series);

/// Versioned JSON document with shape metadata, the normalizer, and flat
/// 64-bit tensors. Round-trips bit-exactly.
std::string model_to_json(const ForecastModel& model, const Normalizer& normalizer);
std::pair<ForecastModel, Normalizer> model_from_json(const std::string& text);

inline constexpr int kModelFormatVersion = 1;

} // namespace proactive
