#include "proactive/training.hpp"

#include "proactive/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace proactive {

void TrainConfig::validate(std::size_t window) const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must lie in [0,1)");
    if (!(epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (kernel_size == 0 || kernel_size % 2 == 0) throw ConfigError("kernel_size must be odd");
    if (kernel_size > window) throw ConfigError("kernel_size exceeds the window length");
}

AdamState AdamState::zeros(const ModelShape& shape) {
    return AdamState{ForecastParams::zeros(shape), ForecastParams::zeros(shape), 0};
}

void adam_step(ForecastParams& params, const ForecastParams& grads, AdamState& state, const TrainConfig& config) {
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);

    std::vector<const std::vector<double>*> g_list;
    grads.for_each([&](std::string_view, const std::vector<double>& g) { g_list.push_back(&g); });
    std::vector<std::vector<double>*> m_list, v_list;
    state.m.for_each([&](std::string_view, std::vector<double>& m) { m_list.push_back(&m); });
    state.v.for_each([&](std::string_view, std::vector<double>& v) { v_list.push_back(&v); });

    std::size_t idx = 0;
    params.for_each([&](std::string_view, std::vector<double>& p) {
        const auto& g = *g_list[idx];
        auto& m = *m_list[idx];
        auto& v = *v_list[idx];
        ++idx;
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            p[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
        }
    });
}

std::size_t resolve_iterations(const TrainConfig& config, std::size_t num_windows) {
    if (config.iterations) return *config.iterations;
    const std::size_t per_epoch = (num_windows + config.batch_size - 1) / config.batch_size;
    return per_epoch * config.epochs;
}

TrainResult train(const WindowBatch& windows, const FeatureSchema& schema, const TrainConfig& config) {
    config.validate(windows.window);
    const auto shape = make_shape(schema, windows.window, config.hidden, config.node_dim, config.kernel_size,
                                  config.activation, config.head_mode);
    return train(windows, ForecastModel::initialize(shape, config.seed), config);
}

TrainResult train(const WindowBatch& windows, ForecastModel initial, const TrainConfig& config) {
    config.validate(initial.shape.window);
    if (windows.size() == 0) throw DataError("no training windows");
    if (windows.window != initial.shape.window) throw ConfigError("window length does not match model");

    TrainResult result{std::move(initial), {}};
    auto& model = result.model;
    const std::size_t iterations = resolve_iterations(config, windows.size());
    result.trace.reserve(iterations);

    // Shuffling uses its own stream so that the initialization seed and the
    // batch order are decoupled.
    std::mt19937_64 rng(config.seed ^ 0xD1B54A32D192ED03ULL);
    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t cursor = 0;

    AdamState adam = AdamState::zeros(model.shape);
    auto grads = ForecastParams::zeros(model.shape);

    for (std::size_t it = 0; it < iterations; ++it) {
        if (cursor >= order.size()) {
            std::shuffle(order.begin(), order.end(), rng);
            cursor = 0;
        }
        const std::size_t end = std::min(cursor + config.batch_size, order.size());
        const double scale = 1.0 / static_cast<double>(end - cursor);

        grads.for_each([](std::string_view, std::vector<double>& g) { std::fill(g.begin(), g.end(), 0.0); });
        LossParts mean;
        try {
            for (std::size_t b = cursor; b < end; ++b) {
                const std::size_t w = order[b];
                const auto parts = accumulate_gradients(model, windows.inputs[w], windows.targets.row(w), config.lambda,
                                                        grads, scale);
                mean.continuous += scale * parts.continuous;
                mean.discrete += scale * parts.discrete;
                mean.total += scale * parts.total;
            }
        } catch (const NumericError& e) {
            throw NumericError("training diverged at iteration " + std::to_string(it) + ": " + e.what());
        }
        if (!std::isfinite(mean.total)) {
            throw NumericError("training diverged at iteration " + std::to_string(it) + ": non-finite loss");
        }
        cursor = end;
        adam_step(model.params, grads, adam, config);
        result.trace.push_back(mean);
    }
    return result;
}

LossParts evaluate(const ForecastModel& model, const WindowBatch& windows, double lambda) {
    LossParts mean;
    if (windows.size() == 0) return mean;
    const double scale = 1.0 / static_cast<double>(windows.size());
    for (std::size_t w = 0; w < windows.size(); ++w) {
        const auto parts = loss(model.shape, forward(model, windows.inputs[w]), windows.targets.row(w), lambda);
        mean.continuous += scale * parts.continuous;
        mean.discrete += scale * parts.discrete;
        mean.total += scale * parts.total;
    }
    return mean;
}

} // namespace proactive
