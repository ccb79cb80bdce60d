#pragma once

#include "proactive/data.hpp"
#include "proactive/forecaster.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace proactive {

struct TrainConfig {
    double learning_rate = 0.005;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double lambda = 1.0;
    /// Number of Adam updates. When unset, `epochs` passes over the windows.
    std::optional<std::size_t> iterations;
    std::size_t epochs = 5;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;

    std::size_t kernel_size = 3;
    Activation activation = Activation::Tanh;
    std::size_t hidden = 256;
    std::size_t node_dim = 10;
    HeadMode head_mode = HeadMode::Shared;

    void validate(std::size_t window) const;
};

/// First and second moment estimates, one per trainable tensor.
struct AdamState {
    ForecastParams m;
    ForecastParams v;
    std::size_t step = 0;

    static AdamState zeros(const ModelShape& shape);
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(ForecastParams& params, const ForecastParams& grads, AdamState& state, const TrainConfig& config);

struct TrainResult {
    ForecastModel model;
    std::vector<LossParts> trace; // mean mini-batch loss, one entry per update
};

/// Iterations the config resolves to for `num_windows` training windows.
std::size_t resolve_iterations(const TrainConfig& config, std::size_t num_windows);

/// Trains a freshly initialized model on normalized windows. Mini-batches
/// are taken sequentially from a seeded permutation reshuffled every pass;
/// the final partial batch is kept. Throws NumericError with the iteration
/// index when the loss stops being finite.
TrainResult train(const WindowBatch& windows, const FeatureSchema& schema, const TrainConfig& config);

/// Same, starting from a given model.
TrainResult train(const WindowBatch& windows, ForecastModel initial, const TrainConfig& config);

/// Mean loss over all windows (no update).
LossParts evaluate(const ForecastModel& model, const WindowBatch& windows, double lambda);

} // namespace proactive
