#include "proactive/detect.hpp"
#include "proactive/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace proactive {

namespace {

struct Activations {
    std::vector<double> input;  // standardized
    std::vector<double> hidden; // tanh output
    std::vector<double> latent;
};

Activations run_encoder(const SvddModel& model, std::span<const double> x) {
    Activations a;
    a.input.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) a.input[j] = (x[j] - model.input_mean[j]) / model.input_scale[j];
    a.hidden.assign(model.w1.rows(), 0.0);
    for (std::size_t k = 0; k < model.w1.rows(); ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.input.size(); ++j) acc += model.w1(k, j) * a.input[j];
        a.hidden[k] = std::tanh(acc);
    }
    a.latent.assign(model.w2.rows(), 0.0);
    for (std::size_t l = 0; l < model.w2.rows(); ++l) {
        double acc = 0.0;
        for (std::size_t k = 0; k < a.hidden.size(); ++k) acc += model.w2(l, k) * a.hidden[k];
        a.latent[l] = acc;
    }
    return a;
}

double distance_to_center(const SvddModel& model, const std::vector<double>& z) {
    double acc = 0.0;
    for (std::size_t l = 0; l < z.size(); ++l) acc += (z[l] - model.center[l]) * (z[l] - model.center[l]);
    return acc;
}

double mean_score(const SvddModel& model, const Matrix& train) {
    double acc = 0.0;
    for (std::size_t i = 0; i < train.rows(); ++i) acc += distance_to_center(model, run_encoder(model, train.row(i)).latent);
    return acc / static_cast<double>(train.rows());
}

struct AdamMatrix {
    std::vector<double> m, v;
    explicit AdamMatrix(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    void step(std::vector<double>& p, const std::vector<double>& g, double lr, std::size_t t) {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        }
    }
};

} // namespace

std::vector<double> SvddModel::embed(std::span<const double> x) const {
    if (x.size() != dims()) throw DataError("SVDD input dimension mismatch");
    return run_encoder(*this, x).latent;
}

SvddModel svdd_fit(const Matrix& train, const SvddConfig& config) {
    const std::size_t n = train.rows();
    const std::size_t dims = train.cols();
    if (n == 0 || dims == 0) throw DataError("SVDD needs a non-empty training matrix");
    if (config.hidden == 0 || config.latent == 0 || config.batch_size == 0) throw ConfigError("SVDD sizes must be positive");
    for (double v : train.data()) {
        if (!std::isfinite(v)) throw DataError("SVDD training data contains non-finite values");
    }

    SvddModel model;
    model.weight_decay = config.weight_decay;
    model.input_mean.assign(dims, 0.0);
    model.input_scale.assign(dims, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dims; ++j) model.input_mean[j] += train(i, j);
    }
    for (auto& m : model.input_mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dims; ++j) {
            const double d = train(i, j) - model.input_mean[j];
            model.input_scale[j] += d * d;
        }
    }
    for (auto& s : model.input_scale) {
        s = std::sqrt(s / static_cast<double>(n));
        if (s <= 0.0) s = 1.0;
    }

    std::mt19937_64 rng(config.seed);
    auto init = [&](Matrix& w, std::size_t rows, std::size_t cols) {
        w = Matrix(rows, cols);
        const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& x : w.data()) x = dist(rng);
    };
    init(model.w1, config.hidden, dims);
    init(model.w2, config.latent, config.hidden);

    model.center.assign(config.latent, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto z = run_encoder(model, train.row(i)).latent;
        for (std::size_t l = 0; l < z.size(); ++l) model.center[l] += z[l];
    }
    for (auto& c : model.center) {
        c /= static_cast<double>(n);
        if (std::abs(c) < 0.1) c = c < 0.0 ? -0.1 : 0.1;
    }

    model.loss_trace.push_back(mean_score(model, train));

    AdamMatrix adam1(model.w1.size()), adam2(model.w2.size());
    std::vector<double> g1(model.w1.size()), g2(model.w2.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, n);
            const double scale = 1.0 / static_cast<double>(end - begin);
            for (std::size_t i = 0; i < g1.size(); ++i) g1[i] = config.weight_decay * model.w1.data()[i];
            for (std::size_t i = 0; i < g2.size(); ++i) g2[i] = config.weight_decay * model.w2.data()[i];
            for (std::size_t b = begin; b < end; ++b) {
                const auto act = run_encoder(model, train.row(order[b]));
                std::vector<double> dhidden(config.hidden, 0.0);
                for (std::size_t l = 0; l < config.latent; ++l) {
                    const double dz = 2.0 * scale * (act.latent[l] - model.center[l]);
                    for (std::size_t k = 0; k < config.hidden; ++k) {
                        g2[l * config.hidden + k] += dz * act.hidden[k];
                        dhidden[k] += dz * model.w2(l, k);
                    }
                }
                for (std::size_t k = 0; k < config.hidden; ++k) {
                    const double du = dhidden[k] * (1.0 - act.hidden[k] * act.hidden[k]);
                    for (std::size_t j = 0; j < dims; ++j) g1[k * dims + j] += du * act.input[j];
                }
            }
            ++step;
            adam1.step(model.w1.data(), g1, config.learning_rate, step);
            adam2.step(model.w2.data(), g2, config.learning_rate, step);
        }
        const double epoch_loss = mean_score(model, train);
        if (!std::isfinite(epoch_loss)) {
            throw NumericError("SVDD training diverged at epoch " + std::to_string(epoch));
        }
        model.loss_trace.push_back(epoch_loss);
    }
    return model;
}

double svdd_score(const SvddModel& model, std::span<const double> x) {
    if (x.size() != model.dims()) throw DataError("SVDD input dimension mismatch");
    return distance_to_center(model, run_encoder(model, x).latent);
}

} // namespace proactive
