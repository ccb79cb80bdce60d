#pragma once

#include "proactive/data.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace proactive {

/// Parameters of the synthetic generator. Continuous channels are a slow
/// periodic trend plus a faster sinusoid plus Gaussian noise; discrete
/// channels follow a sticky Markov chain. Test anomalies are level shifts on
/// every continuous channel, each preceded by an unlabeled linear ramp.
struct SynthConfig {
    std::size_t continuous = 3;
    std::vector<std::size_t> discrete_cardinalities = {3, 2};
    std::size_t embedding_dim = 0; // 0: largest cardinality

    std::size_t train_length = 2000;
    std::size_t test_length = 1000;

    double period = 25.0;
    double amplitude = 1.0;
    double noise = 0.05;
    double trend_amplitude = 0.5;
    double trend_period = 1000.0;
    double discrete_stay = 0.9;

    std::size_t anomaly_count = 3;
    std::size_t anomaly_length = 20;
    double anomaly_magnitude = 6.0;
    std::size_t precursor_length = 5;
    double precursor_scale = 0.5; // ramp peaks at this fraction of the magnitude
    std::size_t anomaly_margin = 10; // minimum clean history before a precursor

    bool inject_anomalies = true;

    /// Throws ConfigError on zero lengths, all-anomalous tests, or segments
    /// that cannot be placed without overlapping.
    void validate() const;

    FeatureSchema schema() const;

    /// Shapes mirroring the public benchmarks: "msl", "smap", "smd", "psm".
    /// Lengths keep the generator defaults.
    static SynthConfig preset(const std::string& name);
};

struct SynthDataset {
    RawSeries train;
    RawSeries test; // labels always attached
    std::vector<std::size_t> anomaly_starts;
};

/// Same seed and config give bit-identical output. Anomaly placement uses
/// an independent stream, so a run with inject_anomalies = false yields the
/// clean version of the same series.
SynthDataset synth_generate(const SynthConfig& config, std::uint64_t seed);

} // namespace proactive
