#include "oracles.hpp"

#include "proactive/detect.hpp"
#include "proactive/error.hpp"
#include "proactive/synth.hpp"
#include "proactive/training.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace proactive;

namespace {

Matrix blobs(oracle::Rng& rng, std::size_t n, double separation) {
    Matrix m(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = i % 2 ? separation : -separation;
        m(i, 0) = c + rng.normal(0, 0.5);
        m(i, 1) = c + rng.normal(0, 0.5);
    }
    return m;
}

double naive_gmm_density(const GmmModel& m, std::span<const double> x) {
    double total = 0.0;
    for (std::size_t k = 0; k < m.components(); ++k) {
        double dens = m.weights[k];
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double var = m.variances(k, j);
            const double d = x[j] - m.means(k, j);
            dens *= std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
        }
        total += dens;
    }
    return total;
}

} // namespace

// ---------------------------------------------------------------------------
// GMM

TEST(Gmm, SingleComponentIsMoments) {
    oracle::Rng rng(1);
    const Matrix x = oracle::random_matrix(rng, 200, 3, -2, 5);
    const auto m = gmm_fit(x, GmmConfig{1, 0, 200, 1e-9});
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0.0, var = 0.0;
        for (std::size_t i = 0; i < 200; ++i) mean += x(i, j) / 200.0;
        for (std::size_t i = 0; i < 200; ++i) var += (x(i, j) - mean) * (x(i, j) - mean) / 200.0;
        EXPECT_NEAR(m.means(0, j), mean, 1e-10);
        EXPECT_NEAR(m.variances(0, j), var, 1e-10);
    }
    EXPECT_NEAR(m.weights[0], 1.0, 1e-12);
}

TEST(Gmm, SeparatesBlobs) {
    oracle::Rng rng(2);
    const auto m = gmm_fit(blobs(rng, 400, 5.0), GmmConfig{2, 3, 200, 1e-8});
    std::vector<double> centers = {m.means(0, 0), m.means(1, 0)};
    std::sort(centers.begin(), centers.end());
    EXPECT_NEAR(centers[0], -5.0, 0.1);
    EXPECT_NEAR(centers[1], 5.0, 0.1);
}

TEST(Gmm, InvariantsAndMonotoneTrace) {
    oracle::Rng rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix x = rep % 2 ? blobs(rng, 150, rng.uniform(0.5, 4)) : oracle::random_matrix(rng, 120, 3);
        const auto m = gmm_fit(x, GmmConfig{4, static_cast<std::uint64_t>(rep), 100, 0.0});
        double wsum = 0.0;
        for (double w : m.weights) wsum += w;
        EXPECT_NEAR(wsum, 1.0, 1e-12);
        for (double v : m.variances.data()) EXPECT_GE(v, kGmmVarianceFloor);
        for (std::size_t i = 1; i < m.log_likelihood_trace.size(); ++i)
            EXPECT_GE(m.log_likelihood_trace[i], m.log_likelihood_trace[i - 1] - 1e-9);
    }
}

TEST(Gmm, DuplicatePointsHitTheFloor) {
    const Matrix x(10, 2, 3.0);
    const auto m = gmm_fit(x, GmmConfig{1, 0, 10, 1e-6});
    EXPECT_EQ(m.variances(0, 0), kGmmVarianceFloor);
}

TEST(Gmm, ScoreExamples) {
    GmmModel m{{1.0}, Matrix(1, 1, 0.0), Matrix(1, 1, 1.0), {}};
    const double zero = 0.0;
    EXPECT_NEAR(gmm_score(m, std::span(&zero, 1)), -0.5 * std::log(2 * std::numbers::pi), 1e-15);
    const double far = 10.0;
    EXPECT_GE(gmm_score(m, std::span(&zero, 1)), gmm_score(m, std::span(&far, 1)));
}

TEST(Gmm, ScoreMatchesDensitySum) {
    oracle::Rng rng(4);
    const auto m = gmm_fit(blobs(rng, 200, 2.0), GmmConfig{3, 1, 50, 1e-8});
    for (int rep = 0; rep < 50; ++rep) {
        const std::vector<double> x = {rng.uniform(-4, 4), rng.uniform(-4, 4)};
        EXPECT_NEAR(gmm_score(m, x), std::log(naive_gmm_density(m, x)), 1e-10);
    }
}

TEST(Gmm, DensityIntegratesToOne) {
    oracle::Rng rng(5);
    const auto m = gmm_fit(blobs(rng, 200, 1.5), GmmConfig{2, 0, 100, 1e-8});
    // Monte-Carlo over the box [-8, 8]^2.
    const int samples = 200000;
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
        const std::vector<double> x = {rng.uniform(-8, 8), rng.uniform(-8, 8)};
        acc += std::exp(gmm_score(m, x));
    }
    EXPECT_NEAR(acc / samples * 256.0, 1.0, 0.05);
}

TEST(Gmm, RejectsTooFewRows) {
    EXPECT_THROW(gmm_fit(Matrix(2, 2), GmmConfig{4, 0, 10, 1e-6}), DataError);
}

// ---------------------------------------------------------------------------
// ECOD

TEST(Ecod, MedianScoresLnTwo) {
    Matrix x(100, 1);
    for (std::size_t i = 0; i < 100; ++i) x(i, 0) = static_cast<double>(i + 1);
    const auto m = ecod_fit(x);
    const double median = 50.5;
    EXPECT_NEAR(ecod_score(m, std::span(&median, 1)), std::log(2.0), 1e-15);
    const double below = -3.0;
    EXPECT_NEAR(ecod_score(m, std::span(&below, 1)), std::log(101.0), 1e-12);
}

TEST(Ecod, MonotoneIntoTails) {
    oracle::Rng rng(6);
    const auto m = ecod_fit(oracle::random_matrix(rng, 300, 2, -1, 1));
    std::vector<double> x = {0.0, 0.0};
    double previous = ecod_score(m, x);
    for (int step = 1; step < 40; ++step) {
        x[0] = 0.05 * step;
        const double s = ecod_score(m, x);
        EXPECT_GE(s, previous);
        previous = s;
    }
}

TEST(Ecod, RankTransformInvariance) {
    oracle::Rng rng(7);
    Matrix x(150, 1), y(150, 1);
    for (std::size_t i = 0; i < 150; ++i) {
        x(i, 0) = rng.uniform(-2, 2);
        y(i, 0) = std::exp(x(i, 0)) * 3.0 + 1.0; // strictly increasing map
    }
    const auto mx = ecod_fit(x);
    const auto my = ecod_fit(y);
    for (int rep = 0; rep < 50; ++rep) {
        const double q = rng.uniform(-3, 3);
        const double qy = std::exp(q) * 3.0 + 1.0;
        const double sx = ecod_score(mx, std::span(&q, 1));
        const double sy = ecod_score(my, std::span(&qy, 1));
        EXPECT_NEAR(sx, sy, 1e-12);
    }
}

// ---------------------------------------------------------------------------
// SVDD

TEST(Svdd, FitReducesTrainingDistance) {
    oracle::Rng rng(8);
    const Matrix x = blobs(rng, 300, 1.0);
    SvddConfig cfg;
    cfg.epochs = 30;
    const auto m = svdd_fit(x, cfg);
    EXPECT_EQ(m.center.size(), 8u);
    for (double c : m.center) EXPECT_GE(std::abs(c), 0.1);
    double after = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) after += svdd_score(m, x.row(i)) / static_cast<double>(x.rows());
    ASSERT_FALSE(m.loss_trace.empty());
    EXPECT_LE(after, m.loss_trace.front());
}

TEST(Svdd, CenterEmbeddingScoresZeroAndIsDeterministic) {
    oracle::Rng rng(9);
    const Matrix x = oracle::random_matrix(rng, 100, 3);
    SvddConfig cfg;
    cfg.epochs = 5;
    const auto a = svdd_fit(x, cfg);
    const auto b = svdd_fit(x, cfg);
    EXPECT_EQ(a.w1, b.w1);
    EXPECT_EQ(a.w2, b.w2);
    EXPECT_EQ(a.center, b.center);
    for (std::size_t i = 0; i < 10; ++i) {
        const auto z = a.embed(x.row(i));
        double d = 0.0;
        for (std::size_t l = 0; l < z.size(); ++l) d += (z[l] - a.center[l]) * (z[l] - a.center[l]);
        EXPECT_NEAR(svdd_score(a, x.row(i)), d, 1e-15);
    }
}

// ---------------------------------------------------------------------------
// Thresholds and the detector union

TEST(Threshold, Examples) {
    const std::vector<double> g = {-3, -1, -2};
    const auto tg = calibrate(DetectorKind::Gmm, g);
    EXPECT_EQ(tg.value, -3.0);
    EXPECT_FALSE(tg.is_anomaly(-2.5));
    EXPECT_TRUE(tg.is_anomaly(-3.5));
    EXPECT_FALSE(tg.is_anomaly(-3.0));

    const std::vector<double> e = {1, 4, 2};
    const auto te = calibrate(DetectorKind::Ecod, e);
    EXPECT_EQ(te.value, 4.0);
    EXPECT_TRUE(te.is_anomaly(5.0));
    EXPECT_FALSE(te.is_anomaly(4.0));
    EXPECT_EQ(calibrate(DetectorKind::Svdd, e).orientation, Orientation::AnomalyHigh);
    EXPECT_THROW(calibrate(DetectorKind::Gmm, std::vector<double>{}), DataError);
}

TEST(Detector, CalibrationSetIsNormalForEveryKind) {
    oracle::Rng rng(10);
    const Matrix x = blobs(rng, 200, 2.0);
    for (auto kind : {DetectorKind::Gmm, DetectorKind::Ecod, DetectorKind::Svdd}) {
        DetectorConfig cfg;
        cfg.kind = kind;
        cfg.svdd.epochs = 5;
        const auto det = Detector::fit(x, cfg);
        EXPECT_EQ(det.kind(), kind);
        for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_FALSE(det.is_anomaly(x.row(i)));
    }
}

TEST(Detector, JsonRoundTripPreservesScores) {
    oracle::Rng rng(11);
    const Matrix x = blobs(rng, 120, 2.0);
    for (auto kind : {DetectorKind::Gmm, DetectorKind::Ecod, DetectorKind::Svdd}) {
        DetectorConfig cfg;
        cfg.kind = kind;
        cfg.svdd.epochs = 3;
        const auto det = Detector::fit(x, cfg);
        const auto back = Detector::from_json(det.to_json());
        EXPECT_EQ(back.threshold().value, det.threshold().value);
        for (int i = 0; i < 100; ++i) {
            const std::vector<double> probe = {rng.uniform(-6, 6), rng.uniform(-6, 6)};
            EXPECT_EQ(back.score(probe), det.score(probe));
        }
    }
    EXPECT_THROW(Detector::from_json("{}"), DataError);
}

TEST(Latency, NegativeWhenFlaggedInPrecursor) {
    //                      0  1  2  3  4  5  6  7  8  9
    const LabelVector labels = {0, 0, 0, 0, 1, 1, 1, 0, 0, 1};
    const LabelVector flags = {0, 0, 1, 0, 0, 0, 0, 0, 0, 0};
    const auto lat = detection_latencies(flags, labels, 0, 10);
    ASSERT_EQ(lat.size(), 2u);
    EXPECT_EQ(lat[0].latency, -2);
    EXPECT_FALSE(lat[1].latency.has_value());

    // A flag inside the previous segment is not credited to the next one.
    const LabelVector flags2 = {0, 0, 0, 0, 0, 1, 0, 0, 0, 0};
    const auto lat2 = detection_latencies(flags2, labels, 0, 10);
    EXPECT_EQ(lat2[0].latency, 1);
    EXPECT_FALSE(lat2[1].latency.has_value());
}

TEST(ProactiveDetect, NeverFlagsWhenEverythingIsNormal) {
    SynthConfig synth;
    synth.train_length = 300;
    synth.test_length = 100;
    synth.anomaly_count = 0;
    const auto data = synth_generate(synth, 3);
    const auto norm = Normalizer::fit(data.train);
    const auto shape = make_shape(data.train.schema, 5, 8, 3, 3);
    const auto model = ForecastModel::initialize(shape, 1);
    // A Gaussian so wide that every score exceeds the calibrated minimum.
    GmmModel wide{{1.0}, Matrix(1, 5, 0.0), Matrix(1, 5, 1e12), {}};
    const Detector det(wide, Threshold{-1e9, Orientation::NormalHigh});
    const auto r = proactive_detect(model, norm, det, data.test);
    EXPECT_EQ(r.flags.size(), data.test.timesteps() - 5);
    EXPECT_EQ(r.num_flagged(), 0u);
    EXPECT_EQ(r.aligned_flags().size(), data.test.timesteps());

    const Detector narrow(GmmModel{{1.0}, Matrix(1, 3, 0.0), Matrix(1, 3, 1.0), {}}, Threshold{});
    EXPECT_THROW(proactive_detect(model, norm, narrow, data.test), DataError);
}
