#pragma once

#include "proactive/data.hpp"
#include "proactive/matrix.hpp"

#include <complex>
#include <cstddef>
#include <set>
#include <span>
#include <vector>

namespace proactive {

inline constexpr std::size_t kDefaultSegmentLength = 6;
inline constexpr double kDefaultBasisEpsilon = 1e-9;

enum class SegmentMode { Train, Anomaly };

/// A fixed-length slice of one channel and the index of its last point.
struct SpectralSegment {
    std::size_t end_index = 0; // index of the last point in the source series
    std::vector<double> values;
};

/// Train mode: every stride-1 window. Anomaly mode: every window whose last
/// point is labeled anomalous and has `length - 1` points of history.
/// Throws DataError when no window qualifies.
std::vector<SpectralSegment> extract_segments(std::span<const double> series, const LabelVector* labels,
                                              SegmentMode mode, std::size_t length = kDefaultSegmentLength);

struct Spectrum {
    std::vector<std::complex<double>> coefficients; // length/2 + 1
    std::vector<double> magnitudes;
};

/// Real-input DFT by direct summation, k = 0..length/2.
Spectrum rdft(std::span<const double> segment);

/// Reconstructs the real segment of length `length` from its half spectrum.
std::vector<double> inverse_rdft(const std::vector<std::complex<double>>& coefficients, std::size_t length);

using BasisSet = std::set<std::size_t>;

/// Frequencies whose magnitude is strictly above `epsilon`.
BasisSet basis_set(std::span<const double> magnitudes, double epsilon = kDefaultBasisEpsilon);

struct SpectralSample {
    std::size_t end_index = 0;
    std::vector<double> magnitudes;
    BasisSet basis;
};

SpectralSample make_sample(const SpectralSegment& segment, double epsilon = kDefaultBasisEpsilon);

/// Whether the union of basis sets on both sides is the same.
bool superset_equal(const std::vector<SpectralSample>& train, const std::vector<SpectralSample>& anomaly);

/// Convex polytope of training magnitude vectors. Membership is an exact
/// phase-1 simplex feasibility problem.
class ConvexHull {
public:
    /// Rows of `points` are the vertices' generators. Throws DataError on
    /// empty or non-finite input.
    explicit ConvexHull(Matrix points, double tolerance = 1e-8);

    bool contains(std::span<const double> query) const;

    std::size_t dims() const { return points_.cols(); }
    std::size_t size() const { return points_.rows(); }

private:
    Matrix points_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    double tolerance_;
};

bool hull_membership(const Matrix& train_points, std::span<const double> query, double tolerance = 1e-8);

struct FeatureHullReport {
    std::string feature;
    std::size_t train_samples = 0;
    std::size_t anomaly_samples = 0;
    bool superset_equal = false;
    std::size_t outside = 0;
    double outside_fraction = 0.0;
};

struct HullPoint {
    std::string feature;
    std::size_t end_index = 0;
    bool inside = false;
    std::vector<double> magnitudes;
};

struct HullReport {
    std::vector<FeatureHullReport> features;
    std::size_t total_anomaly_samples = 0;
    std::size_t total_outside = 0;
    double pooled_outside_fraction = 0.0;
    std::vector<HullPoint> anomaly_points;     // for plotting
    std::vector<HullPoint> train_points;       // for plotting the polytope
};

struct SpectralOptions {
    std::size_t segment_length = kDefaultSegmentLength;
    double epsilon = kDefaultBasisEpsilon;
    double tolerance = 1e-8;
};

/// Per continuous channel: build the training polytope, test every anomaly
/// sample, and pool the outside counts across channels.
HullReport forecastability_report(const RawSeries& train, const RawSeries& test, const SpectralOptions& options = {});

} // namespace proactive
