#include "oracles.hpp"

#include "proactive/error.hpp"
#include "proactive/simplex.hpp"
#include "proactive/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace proactive;

namespace {

double parseval_energy(const Spectrum& s, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
        const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
        acc += (unpaired ? 1.0 : 2.0) * s.magnitudes[k] * s.magnitudes[k];
    }
    return acc / static_cast<double>(n);
}

SpectralSample sample_with_basis(BasisSet basis) {
    SpectralSample s;
    s.basis = std::move(basis);
    return s;
}

} // namespace

TEST(Segments, TrainAndAnomalyModes) {
    std::vector<double> series(10);
    for (std::size_t i = 0; i < 10; ++i) series[i] = static_cast<double>(i);
    const auto train = extract_segments(series, nullptr, SegmentMode::Train, 6);
    ASSERT_EQ(train.size(), 5u);
    EXPECT_EQ(train[0].end_index, 5u);
    EXPECT_EQ(train[4].values, (std::vector<double>{4, 5, 6, 7, 8, 9}));

    LabelVector labels(10, 0);
    labels[5] = 1;
    const auto one = extract_segments(series, &labels, SegmentMode::Anomaly, 6);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].values, (std::vector<double>{0, 1, 2, 3, 4, 5}));

    LabelVector early(10, 0);
    early[3] = 1;
    EXPECT_THROW(extract_segments(series, &early, SegmentMode::Anomaly, 6), DataError);
    EXPECT_THROW(extract_segments(series, nullptr, SegmentMode::Anomaly, 6), DataError);
}

TEST(Rdft, Examples) {
    const std::vector<double> constant(6, 2.0);
    const auto c = rdft(constant);
    ASSERT_EQ(c.magnitudes.size(), 4u);
    EXPECT_NEAR(c.magnitudes[0], 12.0, 1e-12);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(c.magnitudes[k], 0.0, 1e-12);

    std::vector<double> cosine(6);
    for (std::size_t t = 0; t < 6; ++t) cosine[t] = std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / 6.0);
    const auto s = rdft(cosine);
    EXPECT_NEAR(s.magnitudes[1], 3.0, 1e-9);
    EXPECT_NEAR(s.magnitudes[0], 0.0, 1e-12);
    EXPECT_NEAR(s.magnitudes[2], 0.0, 1e-12);
    EXPECT_EQ(basis_set(s.magnitudes), (BasisSet{1}));
}

TEST(Rdft, MatchesNaiveAndInverts) {
    oracle::Rng rng(1);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = rng.range(1, 16);
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform(-5, 5);
        const auto s = rdft(v);
        const auto naive = oracle::naive_dft(v);
        for (std::size_t k = 0; k < naive.size(); ++k) EXPECT_LT(std::abs(s.coefficients[k] - naive[k]), 1e-10);
        double energy = 0.0;
        for (double x : v) energy += x * x;
        EXPECT_NEAR(parseval_energy(s, n), energy, 1e-9);
        const auto back = inverse_rdft(s.coefficients, n);
        for (std::size_t t = 0; t < n; ++t) EXPECT_NEAR(back[t], v[t], 1e-10);
    }
    EXPECT_THROW(rdft(std::vector<double>{}), DataError);
}

TEST(Basis, StrictThreshold) {
    EXPECT_EQ(basis_set(std::vector<double>{1.0, 1e-9, 0.0, 2e-9}, 1e-9), (BasisSet{0, 3}));
    EXPECT_TRUE(basis_set(std::vector<double>{0.0, 0.0}).empty());
}

TEST(Basis, SupersetEquality) {
    const std::vector<SpectralSample> train = {sample_with_basis({0, 1}), sample_with_basis({2})};
    EXPECT_TRUE(superset_equal(train, {sample_with_basis({0, 1, 2})}));
    EXPECT_FALSE(superset_equal(train, {sample_with_basis({0, 1})}));
    EXPECT_FALSE(superset_equal(train, {sample_with_basis({0, 1, 2, 3})}));
    EXPECT_THROW(superset_equal(train, {}), DataError);
}

TEST(Hull, BasicMembership) {
    const Matrix pts(3, 2, std::vector<double>{0, 0, 1, 0, 0, 1});
    const ConvexHull hull(pts);
    EXPECT_TRUE(hull.contains(std::vector<double>{0, 0}));
    EXPECT_TRUE(hull.contains(std::vector<double>{0.5, 0.5}));
    EXPECT_TRUE(hull.contains(std::vector<double>{0.2, 0.2}));
    EXPECT_FALSE(hull.contains(std::vector<double>{0.6, 0.6}));
    EXPECT_FALSE(hull.contains(std::vector<double>{1.5, 0.0}));
    EXPECT_FALSE(hull.contains(std::vector<double>{-0.1, 0.5}));
    EXPECT_THROW(hull.contains(std::vector<double>{0.1}), DataError);
    EXPECT_THROW(ConvexHull(Matrix(0, 2)), DataError);
}

TEST(Hull, AgreesWithHalfPlaneOracle) {
    oracle::Rng rng(2);
    int compared = 0;
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = rng.range(3, 12);
        std::vector<oracle::Point2> pts(n);
        Matrix m(n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            pts[i] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
            m(i, 0) = pts[i].x;
            m(i, 1) = pts[i].y;
        }
        const auto edges = oracle::hull_edges(pts);
        const ConvexHull hull(m);
        const oracle::Point2 q{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)};
        double margin = 0.0;
        const bool expected = oracle::half_plane_inside(edges, q, margin);
        if (margin < 1e-6) continue;
        EXPECT_EQ(hull.contains(std::vector<double>{q.x, q.y}), expected);
        ++compared;
    }
    EXPECT_GT(compared, 250);
}

TEST(Hull, ConvexCombinationsAndOrderInvariance) {
    oracle::Rng rng(3);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = rng.range(2, 10);
        const Matrix pts = oracle::random_matrix(rng, n, 4, 0, 3);
        std::vector<double> w(n);
        double total = 0.0;
        for (auto& x : w) total += (x = rng.uniform(0, 1) + 1e-3);
        std::vector<double> q(4, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < 4; ++j) q[j] += w[i] / total * pts(i, j);
        EXPECT_TRUE(hull_membership(pts, q));

        std::vector<double> above = q;
        double top = 0.0;
        for (std::size_t i = 0; i < n; ++i) top = std::max(top, pts(i, 2));
        above[2] = top + 0.01;
        EXPECT_FALSE(hull_membership(pts, above));

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng.engine());
        Matrix shuffled(n, 4);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < 4; ++j) shuffled(i, j) = pts(order[i], j);
        const std::vector<double> probe = {rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3)};
        EXPECT_EQ(hull_membership(pts, probe), hull_membership(shuffled, probe));
    }
}

TEST(Hull, OutsideStaysOutsideWhenPushedAway) {
    oracle::Rng rng(4);
    const Matrix pts = oracle::random_matrix(rng, 8, 3, 0, 1);
    std::vector<double> centroid(3, 0.0);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 3; ++j) centroid[j] += pts(i, j) / 8.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::vector<double> dir = {rng.normal(), rng.normal(), rng.normal()};
        bool left = false;
        for (int step = 0; step < 40; ++step) {
            std::vector<double> q(3);
            for (std::size_t j = 0; j < 3; ++j) q[j] = centroid[j] + 0.05 * step * dir[j];
            const bool inside = hull_membership(pts, q);
            if (left) EXPECT_FALSE(inside);
            left = left || !inside;
        }
        EXPECT_TRUE(left);
    }
}

TEST(Simplex, PhaseOneExamples) {
    // x1 + x2 = 1, x1 - x2 = 0 -> (0.5, 0.5)
    const Matrix a(2, 2, std::vector<double>{1, 1, 1, -1});
    const auto r = phase_one(a, std::vector<double>{1, 0});
    ASSERT_TRUE(r.feasible);
    EXPECT_NEAR(r.solution[0], 0.5, 1e-12);
    EXPECT_NEAR(r.solution[1], 0.5, 1e-12);

    // x1 + x2 = -1 with x >= 0 has no solution.
    const Matrix b(1, 2, std::vector<double>{1, 1});
    const auto s = phase_one(b, std::vector<double>{-1});
    EXPECT_FALSE(s.feasible);
    EXPECT_NEAR(s.infeasibility, 1.0, 1e-12);
    EXPECT_THROW(phase_one(b, std::vector<double>{1, 2}), DataError);
}

TEST(Forecastability, IdenticalDataIsInside) {
    const auto schema = FeatureSchema::with_default_embedding({"x"}, {});
    RawSeries train{Matrix(60, 1), std::nullopt, schema};
    for (std::size_t t = 0; t < 60; ++t) train.values(t, 0) = std::sin(0.7 * static_cast<double>(t)) + 0.1 * (t % 3);
    RawSeries test = train;
    test.labels = LabelVector(60, 0);
    for (std::size_t t = 20; t < 30; ++t) (*test.labels)[t] = 1;
    const auto r = forecastability_report(train, test);
    EXPECT_EQ(r.total_anomaly_samples, 10u);
    EXPECT_EQ(r.total_outside, 0u);
    EXPECT_EQ(r.pooled_outside_fraction, 0.0);
    ASSERT_EQ(r.features.size(), 1u);
    EXPECT_TRUE(r.features[0].superset_equal);
    EXPECT_EQ(r.train_points.size(), 55u);

    RawSeries spiky = test;
    spiky.values(25, 0) = 50.0;
    const auto s = forecastability_report(train, spiky);
    EXPECT_GT(s.total_outside, 0u);
    EXPECT_GT(s.pooled_outside_fraction, 0.0);

    RawSeries unlabeled = train;
    EXPECT_THROW(forecastability_report(train, unlabeled), DataError);
}
