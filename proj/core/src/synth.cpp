#include "proactive/synth.hpp"

#include "proactive/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace proactive {

void SynthConfig::validate() const {
    if (continuous + discrete_cardinalities.size() == 0) throw ConfigError("synth: no channels");
    if (train_length == 0 || test_length == 0) throw ConfigError("synth: zero-length split");
    if (period <= 0.0 || trend_period <= 0.0) throw ConfigError("synth: periods must be positive");
    if (noise < 0.0) throw ConfigError("synth: noise must be non-negative");
    if (discrete_stay < 0.0 || discrete_stay > 1.0) throw ConfigError("synth: discrete_stay must lie in [0,1]");
    for (auto card : discrete_cardinalities) {
        if (card == 0) throw ConfigError("synth: zero cardinality");
    }
    if (anomaly_count > 0) {
        if (anomaly_length == 0) throw ConfigError("synth: zero-length anomaly segments");
        if (anomaly_count * anomaly_length >= test_length) throw ConfigError("synth: test split would be all-anomalous");
        const std::size_t slot = test_length / anomaly_count;
        if (slot < anomaly_margin + precursor_length + anomaly_length + 1) {
            throw ConfigError("synth: anomaly segments do not fit into the test split");
        }
    }
    schema().validate();
}

FeatureSchema SynthConfig::schema() const {
    std::vector<std::string> cont;
    for (std::size_t j = 0; j < continuous; ++j) cont.push_back("c" + std::to_string(j));
    std::vector<DiscreteColumn> disc;
    for (std::size_t j = 0; j < discrete_cardinalities.size(); ++j) {
        disc.push_back({"d" + std::to_string(j), discrete_cardinalities[j]});
    }
    auto schema = FeatureSchema::with_default_embedding(std::move(cont), std::move(disc), 1);
    if (embedding_dim != 0) schema.embedding_dim = embedding_dim;
    return schema;
}

SynthConfig SynthConfig::preset(const std::string& name) {
    SynthConfig cfg;
    if (name == "msl") {
        cfg.continuous = 1;
        cfg.discrete_cardinalities.assign(54, 2);
    } else if (name == "smap") {
        cfg.continuous = 1;
        cfg.discrete_cardinalities.assign(24, 2);
    } else if (name == "smd") {
        cfg.continuous = 36;
        cfg.discrete_cardinalities.assign(2, 16);
    } else if (name == "psm") {
        cfg.continuous = 25;
        cfg.discrete_cardinalities.clear();
        cfg.embedding_dim = 3;
    } else if (name != "default") {
        throw ConfigError("unknown synth preset '" + name + "'");
    }
    return cfg;
}

namespace {

struct ChannelShape {
    double level;
    double phase;
    double trend_phase;
};

} // namespace

SynthDataset synth_generate(const SynthConfig& config, std::uint64_t seed) {
    config.validate();
    const auto schema = config.schema();
    const std::size_t c = config.continuous;
    const std::size_t d = config.discrete_cardinalities.size();
    const std::size_t total = config.train_length + config.test_length;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<ChannelShape> shapes(c);
    for (auto& s : shapes) {
        s.level = 2.0 * unit(rng) - 1.0;
        s.phase = 2.0 * std::numbers::pi * unit(rng);
        s.trend_phase = 2.0 * std::numbers::pi * unit(rng);
    }

    Matrix values(total, c + d);
    for (std::size_t t = 0; t < total; ++t) {
        const double tt = static_cast<double>(t);
        for (std::size_t j = 0; j < c; ++j) {
            const auto& s = shapes[j];
            const double trend = config.trend_amplitude * std::sin(2.0 * std::numbers::pi * tt / config.trend_period + s.trend_phase);
            const double season = config.amplitude * std::sin(2.0 * std::numbers::pi * tt / config.period + s.phase);
            values(t, j) = s.level + trend + season + config.noise * gauss(rng);
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        const auto card = config.discrete_cardinalities[j];
        std::size_t state = static_cast<std::size_t>(unit(rng) * static_cast<double>(card)) % card;
        for (std::size_t t = 0; t < total; ++t) {
            if (t > 0 && card > 1 && unit(rng) >= config.discrete_stay) {
                // Jump to one of the other states uniformly.
                std::size_t jump = static_cast<std::size_t>(unit(rng) * static_cast<double>(card - 1)) % (card - 1);
                state = jump >= state ? jump + 1 : jump;
            }
            values(t, c + j) = static_cast<double>(state);
        }
    }

    SynthDataset out;
    out.train = RawSeries{Matrix(config.train_length, c + d), std::nullopt, schema};
    std::copy_n(values.data().begin(), config.train_length * (c + d), out.train.values.data().begin());
    out.test = RawSeries{Matrix(config.test_length, c + d), LabelVector(config.test_length, 0), schema};
    std::copy_n(values.data().begin() + static_cast<std::ptrdiff_t>(config.train_length * (c + d)),
                config.test_length * (c + d), out.test.values.data().begin());

    if (config.anomaly_count > 0) {
        std::mt19937_64 placement(seed ^ 0x9E3779B97F4A7C15ULL);
        const std::size_t slot = config.test_length / config.anomaly_count;
        for (std::size_t k = 0; k < config.anomaly_count; ++k) {
            const std::size_t lo = k * slot + config.anomaly_margin + config.precursor_length;
            const std::size_t hi = (k + 1) * slot - config.anomaly_length; // inclusive upper bound
            std::uniform_int_distribution<std::size_t> pick(lo, hi);
            out.anomaly_starts.push_back(pick(placement));
        }
    }

    if (config.inject_anomalies) {
        const double shift = config.anomaly_magnitude * config.amplitude;
        for (auto start : out.anomaly_starts) {
            for (std::size_t i = 1; i <= config.precursor_length; ++i) {
                const std::size_t t = start - config.precursor_length - 1 + i;
                const double ramp = config.precursor_scale * shift * static_cast<double>(i) /
                                    static_cast<double>(config.precursor_length + 1);
                for (std::size_t j = 0; j < c; ++j) out.test.values(t, j) += ramp;
            }
            for (std::size_t t = start; t < start + config.anomaly_length; ++t) {
                for (std::size_t j = 0; j < c; ++j) out.test.values(t, j) += shift;
                (*out.test.labels)[t] = 1;
            }
        }
    }
    return out;
}

} // namespace proactive
